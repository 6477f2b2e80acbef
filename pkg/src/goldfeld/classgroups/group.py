"""Class groups of quadratic fields: structure, 3-torsion and 3-ranks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..arith import TooLargeError, factorize, field_discriminant, is_fundamental_discriminant
from . import _kernels

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class ClassGroupData:
    """Class group of discriminant D (narrow for D > 0).

    ``h3`` is the order of the 3-torsion subgroup, 3**rank3. The full
    3-primary part is available as ``three_part``.
    """

    discriminant: int
    h: int
    cyclic_factors: tuple[int, ...]
    h3: int
    rank3: int

    def __post_init__(self):
        if math.prod(self.cyclic_factors) != self.h:
            raise ValueError("cyclic factors do not multiply to h")
        for x, y in zip(self.cyclic_factors, self.cyclic_factors[1:]):
            if y % x:
                raise ValueError("cyclic factors must divide each other")
        if self.rank3 != sum(1 for x in self.cyclic_factors if x % 3 == 0):
            raise ValueError("rank3 disagrees with cyclic factors")
        if self.h3 != 3**self.rank3:
            raise ValueError("h3 must equal 3**rank3")

    @property
    def three_part(self) -> int:
        t = 1
        for x in self.cyclic_factors:
            while x % 3 == 0:
                x //= 3
                t *= 3
        return t


def structure_from_torsion(h: int, torsion) -> tuple[int, ...]:
    """Invariant factors of an abelian group of order h given m -> |G[m]|."""
    per_prime: dict[int, list[int]] = {}
    for p, e in factorize(h).pairs if h > 1 else ():
        ranks = [0]
        k = 0
        while ranks[-1] < e:
            k += 1
            c = torsion(p**k)
            t = round(math.log(c, p))
            if p**t != c:
                raise ArithmeticError(f"|G[{p}^{k}]| = {c} is not a power of {p}")
            ranks.append(t)
        steps = [ranks[i] - ranks[i - 1] for i in range(1, len(ranks))]
        # steps[k-1] = number of cyclic p-factors of exponent >= k
        exps = [sum(1 for s in steps if s >= i) for i in range(1, steps[0] + 1)]
        per_prime[p] = sorted(exps, reverse=True)
    n = max((len(v) for v in per_prime.values()), default=0)
    factors = []
    for j in range(n):
        f = 1
        for p, exps in per_prime.items():
            if j < len(exps):
                f *= p ** exps[j]
        factors.append(f)
    return tuple(reversed(factors)) or (1,)


def _check(D: int, cap: int) -> None:
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if abs(D) > cap:
        raise TooLargeError(f"|D| = {abs(D)} exceeds class-group cap {cap}")


def _torsion_fn(D: int):
    if D < 0:
        spf, primes = _kernels.tables(-D // 3 + 1)
        return lambda m: int(_kernels.imag_torsion(D, m, spf, primes)[1]), int(
            _kernels.imag_torsion(D, 0, spf, primes)[0]
        )
    _, primes = _kernels.tables(math.isqrt(D) + 1)
    return lambda m: int(_kernels.real_torsion(D, m, primes)[1]), int(_kernels.real_torsion(D, 0, primes)[0])


def class_group(D: int, cap: int = DEFAULT_CAP) -> ClassGroupData:
    """Class group (narrow for D > 0) of the fundamental discriminant D."""
    _check(D, cap)
    torsion, h = _torsion_fn(D)
    factors = structure_from_torsion(h, torsion)
    rank3 = sum(1 for x in factors if x % 3 == 0)
    return ClassGroupData(D, h, factors, 3**rank3, rank3)


_H3_MEMO: dict[int, int] = {}


def h3(D: int, cap: int | None = None) -> int:
    """|Cl(Q(sqrt(D)))[3]|; D is first replaced by the field discriminant."""
    if D == 0:
        raise ValueError("D must be nonzero")
    if D > 0 and math.isqrt(D) ** 2 == D:
        raise ValueError(f"{D} is a square")
    fd = field_discriminant(D)
    if cap is not None and abs(fd) > cap:
        raise TooLargeError(f"|D| = {abs(fd)} exceeds class-group cap {cap}")
    hit = _H3_MEMO.get(fd)
    if hit is not None:
        return hit
    val = int(h3_many(np.array([fd], dtype=np.int64))[0])
    _H3_MEMO[fd] = val
    return val


def preload_h3(table: dict[int, int]) -> int:
    """Seed the h3 memo from precomputed data (e.g. the CSV cache); returns the number of entries added."""
    before = len(_H3_MEMO)
    _H3_MEMO.update({int(D): int(v) for D, v in table.items()})
    return len(_H3_MEMO) - before


def h3_many(Ds: np.ndarray) -> np.ndarray:
    """Vectorized |Cl[3]| for an array of fundamental discriminants (mixed signs); memo hits are reused."""
    Ds = np.asarray(Ds, dtype=np.int64)
    if _H3_MEMO:
        known = np.fromiter((_H3_MEMO.get(int(D), 0) for D in Ds), dtype=np.int64, count=len(Ds))
        miss = known == 0
        if miss.any():
            known[miss] = _h3_compute(Ds[miss])
        return known
    return _h3_compute(Ds)


def _h3_compute(Ds: np.ndarray) -> np.ndarray:
    out = np.zeros(len(Ds), dtype=np.int64)
    neg = Ds < 0
    if neg.any():
        spf, primes = _kernels.tables(int(-Ds[neg].min()) // 3 + 1)
        out[neg] = _kernels.imag_h3_batch(Ds[neg], spf, primes)
    if (~neg).any():
        _, primes = _kernels.tables(math.isqrt(int(Ds[~neg].max())) + 1)
        out[~neg] = _kernels.real_h3_batch(Ds[~neg], primes)
    return out


def rank3(D: int) -> int:
    return round(math.log(h3(D), 3))


def scholz_check(d: int) -> tuple[int, int, bool]:
    """3-ranks of Q(sqrt(d)) and Q(sqrt(-3d)) and whether r+ <= r- <= r+ + 1."""
    if d <= 1 or not is_fundamental_discriminant(d):
        raise ValueError(f"{d} must be a positive fundamental discriminant")
    r_plus = rank3(d)
    r_minus = rank3(-3 * d)
    return r_plus, r_minus, r_plus <= r_minus <= r_plus + 1


def fundamental_discriminants(lo: int, hi: int) -> np.ndarray:
    """All fundamental discriminants d with lo <= d <= hi, ascending (sieve based)."""
    if lo > hi:
        return np.zeros(0, dtype=np.int64)
    bound = max(abs(lo), abs(hi))
    sf = squarefree_sieve(bound)
    d = np.arange(lo, hi + 1, dtype=np.int64)
    a = np.abs(d)
    ok = np.zeros(len(d), dtype=bool)
    m1 = (d % 4 == 1) & sf[a]
    q = a // 4
    m4 = (d % 4 == 0) & ((d // 4) % 4 >= 2) & sf[q]
    ok = (m1 | m4) & (d != 1) & (d != 0)
    return d[ok]


def squarefree_sieve(n: int) -> np.ndarray:
    """Boolean array s with s[k] true iff k is squarefree (s[0] false)."""
    s = np.ones(n + 1, dtype=bool)
    s[0] = False
    for p in range(2, math.isqrt(n) + 1):
        s[p * p :: p * p] = False
    return s
