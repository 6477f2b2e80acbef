"""Exact integer primitives: Kronecker symbols, factorization, discriminants, CRT."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

FACTOR_CAP = 2**63
_TRIAL_LIMIT = 10**6


class TooLargeError(ValueError):
    """Input exceeds a configured computation cap."""


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of |n| as ascending (prime, exponent) pairs."""

    pairs: tuple[tuple[int, int], ...]

    def primes(self) -> list[int]:
        return [p for p, _ in self.pairs]

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def exponent(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n).

    (a/-1) is 1 for a >= 0 and -1 otherwise; (a/2) is 0 for even a, 1 for
    a = +-1 mod 8 and -1 for a = +-3 mod 8.
    """
    if a == 0 and n == 0:
        raise ValueError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # strip factors of two from n
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    # now n odd positive: Jacobi symbol
    a %= n
    result = sign
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(primes_up_to(_TRIAL_LIMIT))


def primes_up_to(n: int) -> list[int]:
    """All primes <= n (sieve of Eratosthenes)."""
    import numpy as np

    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int, cap: int = FACTOR_CAP) -> Factorization:
    """Factor |n|; the sign of n is the caller's business."""
    if n == 0:
        raise ValueError("cannot factor 0")
    m = abs(n)
    if m > cap:
        raise TooLargeError(f"|{n}| exceeds factorization cap {cap}")
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < _TRIAL_LIMIT**2:
            out[m] = out.get(m, 0) + 1
        else:
            _split(m, out)
    return Factorization(tuple(sorted(out.items())))


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel s with n = s * k^2."""
    s = -1 if n < 0 else 1
    for p, e in factorize(n):
        if e % 2:
            s *= p
    return s


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def field_discriminant(n: int) -> int:
    """Fundamental discriminant of Q(sqrt(n)); 1 when n is a square."""
    if n == 0:
        raise ValueError("n must be nonzero")
    s = squarefree_part(n)
    if s == 1:
        return 1
    return s if s % 4 == 1 else 4 * s


def sixth_power_free_core(d: int) -> tuple[int, int]:
    """Return (core, scale) with d = core * scale**6 and core sixth-power-free."""
    if d == 0:
        raise ValueError("d must be nonzero")
    core = -1 if d < 0 else 1
    scale = 1
    for p, e in factorize(d):
        scale *= p ** (e // 6)
        core *= p ** (e % 6)
    return core, scale


def valuation(n: int | Fraction, p: int) -> float | int:
    """p-adic valuation; math.inf for zero."""
    if n == 0:
        return math.inf
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def crt(pairs: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine congruences x = r mod m; overlapping moduli must agree."""
    r, m = 0, 1
    for r2, m2 in pairs:
        if m2 <= 0:
            raise ValueError("moduli must be positive")
        g = math.gcd(m, m2)
        if (r2 - r) % g:
            raise ValueError(f"inconsistent congruences mod {m} and {m2}")
        l = m // g * m2
        # solve r + m*t = r2 mod m2
        t = ((r2 - r) // g) * pow(m // g, -1, m2 // g) % (m2 // g) if m2 // g > 1 else 0
        r = (r + m * t) % l
        m = l
    return r, m


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo the odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def hensel_sqrt(a: int, p: int, k: int) -> int:
    """Square root of a modulo p**k for an odd prime p with p not dividing a."""
    r = sqrt_mod_prime(a, p)
    mod = p
    for _ in range(1, k):
        mod *= p
        # Newton step r <- r - (r^2 - a)/(2r)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r % p**k
