"""Curve tables in the text format `label|a1,a2,a3,a4,a6`."""

from __future__ import annotations

from pathlib import Path

from .weierstrass import WeierstrassCurve

BUILTIN = """\
11a1|0,-1,1,-10,-20
14a1|1,0,1,4,-6
19a1|0,1,1,-9,-15
27a1|0,0,1,0,-7
30a1|1,0,1,1,2
37a1|0,0,1,-1,0
144a1|0,0,0,0,-1
"""


class CurveTableError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


def parse_curve_table(text: str) -> dict[str, WeierstrassCurve]:
    """Blank lines and lines starting with # are skipped."""
    out: dict[str, WeierstrassCurve] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.count("|") != 1:
            raise CurveTableError(lineno, raw, "expected exactly one '|'")
        label, coeffs = (s.strip() for s in line.split("|"))
        if not label:
            raise CurveTableError(lineno, raw, "empty label")
        parts = [s.strip() for s in coeffs.split(",")]
        if len(parts) != 5:
            raise CurveTableError(lineno, raw, f"expected 5 coefficients, got {len(parts)}")
        try:
            ainvs = [int(s) for s in parts]
        except ValueError:
            raise CurveTableError(lineno, raw, "non-integer coefficient") from None
        if label in out:
            raise CurveTableError(lineno, raw, f"duplicate label {label}")
        try:
            out[label] = WeierstrassCurve(*ainvs, label=label)
        except ValueError as exc:
            raise CurveTableError(lineno, raw, str(exc)) from None
    return out


def load_curve_table(path: str | Path) -> dict[str, WeierstrassCurve]:
    return parse_curve_table(Path(path).read_text())


BUILTIN_CURVES = parse_curve_table(BUILTIN)


def curve_by_label(label: str, extra: dict[str, WeierstrassCurve] | None = None) -> WeierstrassCurve:
    """Builtin label, extra table entry, or an E_d label such as `E_-4`."""
    if extra and label in extra:
        return extra[label]
    if label in BUILTIN_CURVES:
        return BUILTIN_CURVES[label]
    if label.startswith("E_"):
        from .sextic import sextic_curve

        return sextic_curve(int(label[2:]))
    raise KeyError(f"unknown curve label {label!r}")
