from .points import (
    AP_CAP,
    an,
    an_list,
    an_lists,
    ap,
    bad_primes,
    conductor,
    is_semistable,
    local_data,
    reduction_decomposition,
)
from .sextic import SexticTwist, mod3_characters, sextic_curve, tamagawa_c3_formula
from .table import (
    BUILTIN_CURVES,
    CurveTableError,
    curve_by_label,
    load_curve_table,
    parse_curve_table,
)
from .tate import CurveLocalData, tate_local_data
from .weierstrass import WeierstrassCurve

__all__ = [
    "AP_CAP",
    "BUILTIN_CURVES",
    "CurveLocalData",
    "CurveTableError",
    "SexticTwist",
    "WeierstrassCurve",
    "an",
    "an_list",
    "an_lists",
    "ap",
    "bad_primes",
    "conductor",
    "curve_by_label",
    "is_semistable",
    "load_curve_table",
    "local_data",
    "mod3_characters",
    "parse_curve_table",
    "reduction_decomposition",
    "sextic_curve",
    "tamagawa_c3_formula",
    "tate_local_data",
]
