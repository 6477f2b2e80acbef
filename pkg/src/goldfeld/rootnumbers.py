"""Global root numbers of sextic, quadratic and cubic twists."""

from __future__ import annotations

from dataclasses import dataclass

from .arith import factorize, is_fundamental_discriminant, kronecker
from .curves import WeierstrassCurve, ap, conductor, is_semistable


@dataclass(frozen=True)
class RootNumberBreakdown:
    """Local factors at 2, at 3 and over primes >= 5, with the global sign -w2*w3*w_tail."""

    d: int
    w2: int
    w3: int
    w_tail: int
    w_global: int

    def __post_init__(self):
        for w in (self.w2, self.w3, self.w_tail, self.w_global):
            if w not in (-1, 1):
                raise ValueError("root numbers are +1 or -1")
        if self.w_global != -self.w2 * self.w3 * self.w_tail:
            raise ValueError("global root number violates the product formula")


def _sign(d: int) -> int:
    return 1 if d > 0 else -1


def sextic_closed_form(d: int) -> int:
    """w(E_d) by residue of d mod 9 for fundamental d = 0 or 2 mod 3."""
    table = {3: -1, 6: 1, 2: 1, 5: -1, 8: -1}
    if d % 9 not in table:
        raise ValueError(f"d = {d} is not 0 or 2 mod 3 (or is 0 mod 9)")
    return table[d % 9] * _sign(d)


def sextic_root_number(d: int) -> RootNumberBreakdown:
    """Root number of E_d : y^2 = x^3 - 432 d for fundamental d = 0 or 2 mod 3."""
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    if d % 3 == 1:
        raise ValueError(f"d = {d} is 1 mod 3; only d = 0 or 2 mod 3 are covered")
    if d % 9 == 0:
        raise ValueError(f"d = {d} is 0 mod 9")
    w2 = -1 if d % 8 == 0 and d % 16 else 1
    if d % 3 == 0:
        w3 = 1
    else:
        w3 = 1 if d % 9 == 2 else -1
    count = sum(1 for p in factorize(d).primes() if p >= 5 and p % 3 == 2)
    w_tail = -1 if count % 2 else 1
    out = RootNumberBreakdown(d, w2, w3, w_tail, -w2 * w3 * w_tail)
    if out.w_global != sextic_closed_form(d):
        raise AssertionError(f"local factors disagree with the closed form at d = {d}")
    return out


def quadratic_twist_root_number(E: WeierstrassCurve, d: int, N: int | None = None) -> int:
    """w(E^(d)) for semistable E: -sign(d) * prod over l | N, l not dividing d, of -psi_d(l) a_l(E).

    Primes dividing both N and d contribute psi_{d,l}(-1); together with the primes
    of d where E is good these multiply to psi_d(-1) = sign(d).
    """
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    if not is_semistable(E):
        raise ValueError("quadratic twist root numbers are only provided for semistable curves")
    N = N or conductor(E)
    w = -_sign(d)
    for ell in factorize(N).primes():
        if d % ell:
            w *= -kronecker(d, ell) * ap(E, ell)
    return w


def cubic_twist_root_number_108(D: int) -> int:
    """Root number of the cubic twist of 144a1 by D = 1 mod 3, read off D mod 9."""
    if D % 3 != 1:
        raise ValueError(f"D = {D} must be 1 mod 3")
    return -1 if D % 9 == 7 else 1
