"""Point counts a_p, Hecke coefficients a_n and global reduction data."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..arith import TooLargeError, factorize, is_prime, primes_up_to
from .tate import CurveLocalData, tate_local_data
from .weierstrass import WeierstrassCurve

AP_CAP = 10**6


def _chi_table(p: int) -> np.ndarray:
    """Legendre symbol mod odd p as an int64 lookup table."""
    x = np.arange(p, dtype=np.int64)
    tab = -np.ones(p, dtype=np.int64)
    tab[(x * x) % p] = 1
    tab[0] = 0
    return tab


def _count_odd(ainvs, p: int, chi: np.ndarray | None = None) -> int:
    """a_p = -sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6) for odd p (any model, singular allowed)."""
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = a1 * a3 + 2 * a4
    b6 = a3 * a3 + 4 * a6
    if chi is None:
        chi = _chi_table(p)
    x = np.arange(p, dtype=np.int64)
    v = (4 * x + b2 % p) % p
    v = (v * x + (2 * b4) % p) % p
    v = (v * x + b6 % p) % p
    return -int(chi[v].sum())


def _count_brute(ainvs, p: int) -> int:
    a1, a2, a3, a4, a6 = ainvs
    n = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % p == 0:
                n += 1
    return p + 1 - n


def _ap_model(ainvs, p: int, chi=None) -> int:
    return _count_brute(ainvs, p) if p <= 3 else _count_odd(ainvs, p, chi)


def local_data(curve: WeierstrassCurve, p: int) -> CurveLocalData:
    return _local_cached(curve.ainvs, p)


@lru_cache(maxsize=200_000)
def _local_cached(ainvs, p):
    return tate_local_data(WeierstrassCurve(*ainvs), p)


def ap(curve: WeierstrassCurve, p: int) -> int:
    """p + 1 - #E(F_p) on a model minimal at p (including the singular point if bad)."""
    if p > AP_CAP:
        raise TooLargeError(f"p = {p} exceeds point-count cap {AP_CAP}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    model = curve.ainvs
    good = curve.discriminant % p != 0
    if not good:
        data = local_data(curve, p)
        model = data.minimal_model.ainvs
        good = data.reduction == "good"
    a = _ap_model(model, p)
    if good and a * a > 4 * p:
        raise AssertionError(f"Hasse bound violated: a_{p} = {a}")
    return a


def _prime_power_coeffs(a_p: int, p: int, kmax: int, bad: str | None) -> list[int]:
    out = [1, a_p]
    for _ in range(2, kmax + 1):
        if bad == "additive":
            out.append(0)
        elif bad is not None:
            out.append(out[-1] * a_p)
        else:
            out.append(a_p * out[-1] - p * out[-2])
    return out


def an(curve: WeierstrassCurve, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, e in factorize(n):
        bad = None
        if curve.discriminant % p == 0:
            red = local_data(curve, p).reduction
            bad = None if red == "good" else ("additive" if red == "additive" else "mult")
        out *= _prime_power_coeffs(ap(curve, p), p, e, bad)[e]
    return out


def an_list(curve: WeierstrassCurve, nmax: int) -> np.ndarray:
    """Array with a[n] = a_n for 1 <= n <= nmax (a[0] = 0)."""
    return an_lists([curve], nmax)[0]


def an_lists(curves: list[WeierstrassCurve], nmax: int) -> list[np.ndarray]:
    """Hecke coefficients up to nmax for several curves, sharing Legendre tables."""
    primes = primes_up_to(nmax)
    aps = np.zeros((len(curves), len(primes)), dtype=np.int64)
    kinds = [[None] * len(primes) for _ in curves]
    for j, p in enumerate(primes):
        chi = _chi_table(p) if p > 3 else None
        for i, E in enumerate(curves):
            model = E.ainvs
            if E.discriminant % p == 0:
                data = local_data(E, p)
                model = data.minimal_model.ainvs
                if data.reduction == "additive":
                    kinds[i][j] = "additive"
                elif data.reduction != "good":
                    kinds[i][j] = "mult"
            a = _ap_model(model, p, chi)
            if kinds[i][j] is None and a * a > 4 * p:
                raise AssertionError(f"Hasse bound violated for {E} at {p}")
            aps[i, j] = a
    out = []
    for i in range(len(curves)):
        a = np.zeros(nmax + 1, dtype=object)
        a[1] = 1
        # multiplicative sieve: build from smallest prime factor
        spf = np.zeros(nmax + 1, dtype=np.int64)
        for p in primes:
            blk = spf[p::p]
            blk[blk == 0] = p
        pidx = {p: j for j, p in enumerate(primes)}
        for n in range(2, nmax + 1):
            p = int(spf[n])
            m, e = n, 0
            while m % p == 0:
                m //= p
                e += 1
            if m == 1:
                j = pidx[p]
                coeffs = _prime_power_coeffs(int(aps[i, j]), p, e, kinds[i][j])
                a[n] = coeffs[e]
            else:
                a[n] = a[n // m] * a[m]
        out.append(np.array(a, dtype=np.int64))
    return out


def bad_primes(curve: WeierstrassCurve) -> list[int]:
    """Primes dividing the discriminant; small primes are stripped before the factorization cap applies."""
    return _bad_primes(curve.discriminant)


@lru_cache(maxsize=100_000)
def _bad_primes(disc: int) -> list[int]:
    n = abs(disc)
    out = []
    for p in primes_up_to(10**4):
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        if n == 1:
            break
    if n > 1:
        out.extend(factorize(n).primes())
    return sorted(out)


def conductor(curve: WeierstrassCurve) -> int:
    N = 1
    for p in bad_primes(curve):
        N *= p ** local_data(curve, p).f_exp
    return N


def reduction_decomposition(curve: WeierstrassCurve) -> tuple[int, int, int]:
    """(N_split, N_nonsplit, N_additive) with split/nonsplit read off a_p = +1/-1."""
    split = nonsplit = add = 1
    for p in bad_primes(curve):
        data = local_data(curve, p)
        if data.f_exp == 0:
            continue
        if data.f_exp == 1:
            a = _ap_model(data.minimal_model.ainvs, p)
            if a == 1:
                split *= p
            elif a == -1:
                nonsplit *= p
            else:
                raise AssertionError(f"multiplicative prime {p} with a_p = {a}")
        else:
            add *= p ** data.f_exp
    return split, nonsplit, add


def is_semistable(curve: WeierstrassCurve) -> bool:
    return all(local_data(curve, p).f_exp <= 1 for p in bad_primes(curve))
