"""Quadratic Dirichlet characters and their first generalized Bernoulli numbers."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import field_discriminant, is_fundamental_discriminant, kronecker, valuation


@dataclass(frozen=True)
class QuadraticCharacter:
    """Character of Q(sqrt(discriminant)); discriminant 1 encodes the trivial character."""

    discriminant: int

    def __post_init__(self):
        d = self.discriminant
        if d != 1 and not is_fundamental_discriminant(d):
            raise ValueError(f"{d} is not a fundamental discriminant")

    @classmethod
    def of_field(cls, n: int) -> "QuadraticCharacter":
        """Character of Q(sqrt(n)) for any nonzero n."""
        return cls(field_discriminant(n))

    @property
    def conductor(self) -> int:
        return abs(self.discriminant)

    @property
    def is_trivial(self) -> bool:
        return self.discriminant == 1

    @property
    def is_even(self) -> bool:
        return self.discriminant > 0

    @property
    def is_odd(self) -> bool:
        return self.discriminant < 0

    def __call__(self, n: int) -> int:
        return evaluate(self, n)

    def __mul__(self, other: "QuadraticCharacter") -> "QuadraticCharacter":
        return product(self, other)

    def __repr__(self):
        return "trivial" if self.is_trivial else f"psi({self.discriminant})"


TRIVIAL = QuadraticCharacter(1)
OMEGA = QuadraticCharacter(-3)


def evaluate(chi: QuadraticCharacter, n: int) -> int:
    if chi.is_trivial:
        return 1
    return kronecker(chi.discriminant, n)


def product(chi1: QuadraticCharacter, chi2: QuadraticCharacter) -> QuadraticCharacter:
    """Primitive character attached to the pointwise product."""
    d1, d2 = chi1.discriminant, chi2.discriminant
    if math.gcd(d1, d2) == 1:
        return QuadraticCharacter(d1 * d2)
    return QuadraticCharacter(field_discriminant(d1 * d2))


def psi0(psi: QuadraticCharacter, K: int) -> QuadraticCharacter:
    """psi when psi is even, psi times the character of K when psi is odd."""
    if K >= 0 or not is_fundamental_discriminant(K):
        raise ValueError(f"K = {K} must be a negative fundamental discriminant")
    return psi if psi.is_even or psi.is_trivial else product(psi, QuadraticCharacter(K))


def character_table(d: int, n: int) -> np.ndarray:
    """Values kronecker(d, m) for m = 0..n-1, computed with a vectorized Jacobi loop."""
    m = np.arange(n, dtype=np.int64)
    sign = np.ones(n, dtype=np.int64)
    odd = m.copy()
    odd[0] = 1
    twos = np.zeros(n, dtype=np.int64)
    ev = odd % 2 == 0
    while ev.any():
        odd[ev] //= 2
        twos[ev] += 1
        ev = odd % 2 == 0
    if d % 2 == 0:
        sign[twos > 0] = 0
    elif d % 8 in (3, 5):
        sign[twos % 2 == 1] *= -1
    a = d % odd
    b = odd
    live = a != 0
    while live.any():
        ev = live & (a % 2 == 0)
        while ev.any():
            a[ev] //= 2
            sign[ev & ((b % 8 == 3) | (b % 8 == 5))] *= -1
            ev = live & (a % 2 == 0)
        a[live], b[live] = b[live], a[live]
        sign[live & (a % 4 == 3) & (b % 4 == 3)] *= -1
        a[live] %= b[live]
        live = a != 0
    sign[b != 1] = 0
    sign[0] = 1 if d in (1, -1) else 0
    return sign.astype(np.int8)


@lru_cache(maxsize=65536)
def bernoulli1(chi: QuadraticCharacter) -> Fraction:
    """B_1 of chi as the exact sum (1/f) * sum_{m=1}^{f} chi(m) m."""
    if chi.is_trivial:
        raise ValueError("B_1 of the trivial character is not supported")
    f = chi.conductor
    vals = character_table(chi.discriminant, f + 1)[1:].astype(np.int64)
    total = int(np.dot(vals, np.arange(1, f + 1, dtype=np.int64)))
    return Fraction(total, f)


def bernoulli1_ord3(chi: QuadraticCharacter):
    if not chi.is_odd:
        raise ValueError("ord_3 of B_1 is only defined here for odd characters")
    return valuation(bernoulli1(chi), 3)


def units_count(d: int) -> int:
    """Number of roots of unity in Q(sqrt(d)) for a negative fundamental d."""
    return {-3: 6, -4: 4}.get(d, 2)
