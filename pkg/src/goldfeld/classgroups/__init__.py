from .forms import BinaryQuadraticForm, FormClassGroup, compose, cycle, principal_form, reduce, reduced_forms
from .group import (
    ClassGroupData,
    class_group,
    fundamental_discriminants,
    h3,
    h3_many,
    preload_h3,
    rank3,
    scholz_check,
    structure_from_torsion,
)

__all__ = [
    "BinaryQuadraticForm",
    "ClassGroupData",
    "FormClassGroup",
    "class_group",
    "compose",
    "cycle",
    "fundamental_discriminants",
    "h3",
    "h3_many",
    "preload_h3",
    "principal_form",
    "rank3",
    "reduce",
    "reduced_forms",
    "scholz_check",
    "structure_from_torsion",
]
