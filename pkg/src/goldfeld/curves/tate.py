"""Tate's algorithm: Kodaira symbol, conductor exponent, Tamagawa number, minimal model."""

from __future__ import annotations

from dataclasses import dataclass

from ..arith import kronecker, valuation
from .weierstrass import WeierstrassCurve


@dataclass(frozen=True)
class CurveLocalData:
    prime: int
    kodaira: str
    f_exp: int
    tamagawa: int
    reduction: str  # good, split, nonsplit, additive
    minimal_model: WeierstrassCurve
    disc_valuation: int

    def __post_init__(self):
        expected = {0: "good", 1: "multiplicative"}.get(self.f_exp, "additive")
        kind = "multiplicative" if self.reduction in ("split", "nonsplit") else self.reduction
        if kind != expected or self.tamagawa < 1:
            raise ValueError(f"inconsistent local data {self}")


def _v(n: int, p: int) -> int:
    return valuation(n, p) if n else 10**9


def _has_root_mod(a: int, b: int, c: int, p: int) -> bool:
    """Does a x^2 + b x + c have a root mod p (a, b, c integers)?"""
    a, b, c = a % p, b % p, c % p
    if a == 0:
        return b != 0 or c == 0
    if p <= 3:
        return any((a * x * x + b * x + c) % p == 0 for x in range(p))
    return kronecker(b * b - 4 * a * c, p) >= 0


def _cubic_roots(b: int, c: int, d: int, p: int) -> int:
    """Number of distinct roots of T^3 + b T^2 + c T + d in F_p."""
    if p < 50:
        return sum(1 for x in range(p) if (x**3 + b * x * x + c * x + d) % p == 0)
    # gcd with T^p - T computed by polynomial arithmetic mod p
    f = [d % p, c % p, b % p, 1]
    g = _polypowmod([0, 1], p, f, p)
    g = _polysub(g, [0, 1], p)
    return len(_polygcd(f, g, p)) - 1


def _polytrim(a):
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _polysub(a, b, p):
    n = max(len(a), len(b))
    return _polytrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _polymulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polyrem(out, f, p)


def _polyrem(a, f, p):
    a = list(a)
    inv = pow(f[-1], -1, p)
    while len(a) >= len(f):
        q = a[-1] * inv % p
        shift = len(a) - len(f)
        for i, y in enumerate(f):
            a[shift + i] = (a[shift + i] - q * y) % p
        a.pop()
    return _polytrim(a or [0])


def _polypowmod(a, e, f, p):
    result = [1]
    base = _polyrem(a, f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def _polygcd(a, b, p):
    a, b = _polytrim(list(a)), _polytrim(list(b))
    while b != [0]:
        a, b = b, _polyrem(a, b, p)
    return a


def tate_local_data(curve: WeierstrassCurve, p: int) -> CurveLocalData:
    """Run Tate's algorithm at the prime p, minimalizing the model as needed."""
    E = curve
    while True:
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = E.b_invariants
        c4, _ = E.c_invariants
        n = _v(E.discriminant, p)
        if n == 0:
            return CurveLocalData(p, "I0", 0, 1, "good", E, 0)
        # move the singular point to (0, 0)
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            if c4 % p == 0:
                r = -pow(12, -1, p) * b2 % p
            else:
                r = -pow(12 * c4, -1, p) * (E.c_invariants[1] + b2 * c4) % p
            t = -pow(2, -1, p) * (a1 * r + a3) % p
        E = E.change(r=r, t=t)
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = E.b_invariants
        if c4 % p != 0:
            split = _has_root_mod(1, a1, -a2, p)
            if split:
                return CurveLocalData(p, f"I{n}", 1, n, "split", E, n)
            return CurveLocalData(p, f"I{n}", 1, 2 if n % 2 == 0 else 1, "nonsplit", E, n)
        if _v(a6, p) < 2:
            return CurveLocalData(p, "II", n, 1, "additive", E, n)
        if _v(b8, p) < 3:
            return CurveLocalData(p, "III", n - 1, 2, "additive", E, n)
        if _v(b6, p) < 3:
            c = 3 if _has_root_mod(1, a3 // p, -(a6 // (p * p)), p) else 1
            return CurveLocalData(p, "IV", n - 2, c, "additive", E, n)
        # p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            s = -a1 * pow(2, -1, p) % p
            t = -a3 * pow(2, -1, p) % (p * p)
        E = E.change(s=s, t=t)
        a1, a2, a3, a4, a6 = E.ainvs
        b = a2 // p
        c = a4 // (p * p)
        d = a6 // (p**3)
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b
        if w % p != 0:
            roots = _cubic_roots(b, c, d, p)
            return CurveLocalData(p, "I0*", n - 4, 1 + roots, "additive", E, n)
        if x % p != 0:
            # double root: move it to 0
            if p == 2:
                r = c
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, p)
            r = p * (r % p)
            E = E.change(r=r)
            a1, a2, a3, a4, a6 = E.ainvs
            m = 1
            mx, my = p * p, p * p
            while True:
                xa2 = a2 // p
                xa3 = a3 // my
                xa4 = a4 // (p * mx)
                xa6 = a6 // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % p != 0:
                    c_ = 4 if _has_root_mod(1, xa3, -xa6, p) else 2
                    break
                t = my * (xa6 if p == 2 else (-xa3 * pow(2, -1, p)) % p)
                E = E.change(t=t)
                a1, a2, a3, a4, a6 = E.ainvs
                my *= p
                m += 1
                xa2 = a2 // p
                xa3 = a3 // my
                xa4 = a4 // (p * mx)
                xa6 = a6 // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p != 0:
                    c_ = 4 if _has_root_mod(xa2, xa4, xa6, p) else 2
                    break
                r = mx * (xa6 * xa2 if p == 2 else (-xa4 * pow(2 * xa2, -1, p)) % p)
                E = E.change(r=r)
                a1, a2, a3, a4, a6 = E.ainvs
                mx *= p
                m += 1
            return CurveLocalData(p, f"I{m}*", n - m - 4, c_, "additive", E, n)
        # triple root: move it to 0
        if p == 2:
            rp = b
        elif p == 3:
            rp = -d
        else:
            rp = -b * pow(3, -1, p)
        E = E.change(r=p * (rp % p))
        a1, a2, a3, a4, a6 = E.ainvs
        x3 = a3 // (p * p)
        x6 = a6 // (p**4)
        if (x3 * x3 + 4 * x6) % p != 0:
            c_ = 3 if _has_root_mod(1, x3, -x6, p) else 1
            return CurveLocalData(p, "IV*", n - 6, c_, "additive", E, n)
        t = p * p * (x6 % 2 if p == 2 else (-x3 * pow(2, -1, p)) % p)
        E = E.change(t=t)
        a1, a2, a3, a4, a6 = E.ainvs
        if _v(a4, p) < 4:
            return CurveLocalData(p, "III*", n - 7, 2, "additive", E, n)
        if _v(a6, p) < 6:
            return CurveLocalData(p, "II*", n - 8, 1, "additive", E, n)
        # non-minimal: scale by p and start over
        E = E.change(u=p)
