"""Binary quadratic forms ax^2 + bxy + cy^2: reduction, composition and class groups.

This is the pure-Python reference implementation. The numba kernels in
``_kernels`` reimplement the same algorithms for bulk work and are tested
against this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def inverse(self) -> "BinaryQuadraticForm":
        return BinaryQuadraticForm(self.a, -self.b, self.c)

    def is_reduced(self) -> bool:
        D = self.discriminant
        if D < 0:
            a, b, c = self
            if not (abs(b) <= a <= c):
                return False
            return b >= 0 or (abs(b) != a and a != c)
        return _is_reduced_indefinite(self.a, self.b, D, math.isqrt(D))

    def reduced(self) -> "BinaryQuadraticForm":
        return reduce(self, self.discriminant)

    def __mul__(self, other: "BinaryQuadraticForm") -> "BinaryQuadraticForm":
        return reduce(compose(self, other), self.discriminant)

    def __pow__(self, n: int) -> "BinaryQuadraticForm":
        D = self.discriminant
        if n < 0:
            return self.inverse() ** (-n)
        result = principal_form(D)
        base = reduce(self, D)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"({self.a}, {self.b}, {self.c})"


def principal_form(D: int) -> BinaryQuadraticForm:
    if D < 0:
        b = D % 2
        return BinaryQuadraticForm(1, b, (b * b - D) // 4)
    s = math.isqrt(D)
    b = s if (s - D) % 2 == 0 else s - 1
    return BinaryQuadraticForm(1, b, (b * b - D) // 4)


def compose(f: BinaryQuadraticForm, g: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Gauss composition (unreduced result, b normalized modulo 2a)."""
    a1, b1, _ = f
    a2, b2, _ = g
    D = f.discriminant
    if g.discriminant != D:
        raise ValueError("forms have different discriminants")
    s = (b1 + b2) // 2
    g1, u1, v1 = xgcd(a1, a2)
    e, x, w = xgcd(g1, s)
    u, v = x * u1, x * v1
    A = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
    m = 2 * abs(A)
    B %= m
    if B > abs(A):
        B -= m
    return BinaryQuadraticForm(A, B, (B * B - D) // (4 * A))


def _is_reduced_indefinite(a: int, b: int, D: int, s: int) -> bool:
    if not 0 < b <= s:
        return False
    t = 2 * abs(a)
    return (t + b) ** 2 > D and (t - b <= 0 or (t - b) ** 2 < D)


def rho(f: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """One step of the indefinite reduction operator."""
    a, b, c = f
    D = f.discriminant
    s = math.isqrt(D)
    m = 2 * abs(c)
    if abs(c) <= s:
        b2 = s - (s + b) % m
    else:
        b2 = (-b) % m
        if b2 > abs(c):
            b2 -= m
    return BinaryQuadraticForm(c, b2, (b2 * b2 - D) // (4 * c))


def reduce(f: BinaryQuadraticForm, D: int) -> BinaryQuadraticForm:
    if f.discriminant != D:
        raise ValueError(f"form {f} does not have discriminant {D}")
    if D == 0 or (D > 0 and math.isqrt(D) ** 2 == D):
        raise ValueError("discriminant must be nonzero and not a square")
    a, b, c = f
    if D < 0:
        if a < 0:
            raise ValueError("definite forms must be positive")
        while True:
            m = 2 * a
            b %= m
            if b > a:
                b -= m
            c = (b * b - D) // (4 * a)
            if a > c:
                a, b, c = c, -b, a
                continue
            if b < 0 and (a == c or -b == a):
                b = -b
            return BinaryQuadraticForm(a, b, c)
    s = math.isqrt(D)
    while not _is_reduced_indefinite(f.a, f.b, D, s):
        f = rho(f)
    return f


def cycle(f: BinaryQuadraticForm) -> list[BinaryQuadraticForm]:
    """Rho-cycle of a reduced indefinite form."""
    out = [f]
    g = rho(f)
    while g != f:
        out.append(g)
        g = rho(g)
    return out


def reduced_forms(D: int) -> list[BinaryQuadraticForm]:
    """All primitive reduced forms of discriminant D (brute force over a, b)."""
    out = []
    if D < 0:
        amax = math.isqrt(-D // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b * b - D) % (4 * a):
                    continue
                c = (b * b - D) // (4 * a)
                if c < a or (a == c and b < 0):
                    continue
                if math.gcd(math.gcd(a, b), c) == 1:
                    out.append(BinaryQuadraticForm(a, b, c))
        return out
    s = math.isqrt(D)
    for b in range(1, s + 1):
        if (D - b * b) % 4:
            continue
        n = (D - b * b) // 4
        for a in range(1, s + 1):
            if n % a or not _is_reduced_indefinite(a, b, D, s):
                continue
            c = n // a
            for sa in (a, -a):
                f = BinaryQuadraticForm(sa, b, -c if sa > 0 else c)
                if math.gcd(math.gcd(a, b), c) == 1:
                    out.append(f)
    return out


def class_representatives(D: int) -> list[BinaryQuadraticForm]:
    """One reduced form per (narrow) class; for D > 0 one per rho-cycle."""
    forms = reduced_forms(D)
    if D < 0:
        return forms
    seen = set()
    reps = []
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f)
        seen.update(cyc)
        reps.append(min(cyc, key=lambda g: (abs(g.a), g.a, g.b)))
    return reps


class FormClassGroup:
    """Brute-force class group: elements, composition and element orders."""

    def __init__(self, D: int):
        self.D = D
        self.reps = class_representatives(D)
        self._index = {}
        for i, f in enumerate(self.reps):
            keys = cycle(f) if D > 0 else [f]
            for g in keys:
                self._index[g] = i
        self.identity = self.index(principal_form(D))

    def index(self, f: BinaryQuadraticForm) -> int:
        return self._index[reduce(f, self.D)]

    def mul(self, i: int, j: int) -> int:
        return self.index(compose(self.reps[i], self.reps[j]))

    def __len__(self):
        return len(self.reps)

    def order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def generated_order(self) -> int:
        """Size of the subgroup generated by all representatives, grown coset by coset."""
        members = [self.identity]
        seen = {self.identity}
        for g in range(len(self.reps)):
            if g in seen:
                continue
            block = list(members)
            power = g
            while power not in seen:
                coset = [self.mul(power, x) for x in block]
                members.extend(coset)
                seen.update(coset)
                power = self.mul(power, g)
        return len(seen)

    def torsion_count(self, m: int) -> int:
        return sum(1 for i in range(len(self)) if m % self.order(i) == 0)
