"""Long Weierstrass models y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class WeierstrassCurve:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"singular Weierstrass equation {self.ainvs}")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c_invariants(self) -> tuple[int, int]:
        b2, b4, b6, _ = self.b_invariants
        return b2 * b2 - 24 * b4, -(b2**3) + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def change(self, r: int = 0, s: int = 0, t: int = 0, u: int = 1) -> "WeierstrassCurve":
        """Model under x = u^2 x' + r, y = u^3 y' + s u^2 x' + t (u must divide exactly)."""
        a1, a2, a3, a4, a6 = self.ainvs
        na1 = a1 + 2 * s
        na2 = a2 - s * a1 + 3 * r - s * s
        na3 = a3 + r * a1 + 2 * t
        na4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
        na6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
        out = [na1, na2, na3, na4, na6]
        if u != 1:
            for i, w in enumerate((1, 2, 3, 4, 6)):
                q, rem = divmod(out[i], u**w)
                if rem:
                    raise ValueError("scaling does not give an integral model")
                out[i] = q
        return WeierstrassCurve(*out, label=self.label)

    def quadratic_twist(self, d: int) -> "WeierstrassCurve":
        """Integral model of the twist by Q(sqrt(d)): y^2 = x^3 - 27 c4 d^2 x - 54 c6 d^3."""
        c4, c6 = self.c_invariants
        return WeierstrassCurve(0, 0, 0, -27 * c4 * d * d, -54 * c6 * d**3)

    def __repr__(self):
        tag = f"{self.label} " if self.label else ""
        return f"{tag}[{','.join(map(str, self.ainvs))}]"
