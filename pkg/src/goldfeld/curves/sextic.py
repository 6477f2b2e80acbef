"""The j = 0 family E_d : y^2 = x^3 - 432 d."""

from __future__ import annotations

from dataclasses import dataclass

from ..arith import is_fundamental_discriminant, sixth_power_free_core
from ..characters import OMEGA, QuadraticCharacter
from .weierstrass import WeierstrassCurve


@dataclass(frozen=True)
class SexticTwist:
    d: int

    def __post_init__(self):
        if self.d == 0 or sixth_power_free_core(self.d)[1] != 1:
            raise ValueError(f"{self.d} is not sixth-power-free")

    @classmethod
    def of(cls, d: int) -> "SexticTwist":
        """E_d only depends on d up to sixth powers."""
        return cls(sixth_power_free_core(d)[0])

    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve(0, 0, 0, 0, -432 * self.d, label=f"E_{self.d}")


def sextic_curve(d: int) -> WeierstrassCurve:
    return SexticTwist.of(d).curve()


def mod3_characters(twist: SexticTwist | int) -> tuple[QuadraticCharacter, QuadraticCharacter]:
    """(psi_d, psi_d * omega): the semisimplified mod-3 representation of E_d."""
    d = twist.d if isinstance(twist, SexticTwist) else twist
    psi = QuadraticCharacter.of_field(d)
    return psi, psi * OMEGA


def tamagawa_c3_formula(d: int) -> int:
    """Closed form for c_3(E_d): 3 when d = 2 mod 9, 1 when d = 3, 5, 8 mod 9."""
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    if d % 9 == 2:
        return 3
    if d % 9 in (3, 5, 8):
        return 1
    raise ValueError(f"d = {d} is outside d = 2 mod 3 or d = 3 mod 9")
