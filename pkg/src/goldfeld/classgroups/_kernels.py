"""numba kernels for bulk class-group work (3-torsion counts, class numbers).

Forms are passed around as int64 triples. Imaginary discriminants enumerate
reduced forms by looping over b and splitting (b^2 - D)/4 = a*c with a
smallest-prime-factor table; real discriminants walk rho-cycles and close
the set of classes under composition with prime forms.
"""

import math

import numba as nb
import numpy as np
from numba import njit
from numba import types
from numba.typed import Dict

_SPF = np.zeros(0, dtype=np.int32)
_PRIMES = np.zeros(0, dtype=np.int64)
SPF_MAX = 40_000_000


@njit(cache=True)
def _spf_sieve(limit):
    spf = np.zeros(limit + 1, dtype=np.int32)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            if i * i <= limit:
                for j in range(i * i, limit + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


def tables(limit):
    """Smallest-prime-factor table covering ``limit`` (capped) plus a prime list."""
    global _SPF, _PRIMES
    limit = min(max(limit, 1000), SPF_MAX)
    if len(_SPF) <= limit:
        size = max(limit, 2 * len(_SPF))
        size = min(size, SPF_MAX)
        _SPF = _spf_sieve(size)
        idx = np.arange(len(_SPF))
        _PRIMES = idx[(_SPF == idx) & (idx >= 2)].astype(np.int64)
    return _SPF, _PRIMES


@njit(cache=True)
def _isqrt(n):
    if n <= 0:
        return 0
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@njit(cache=True)
def _compose(a1, b1, a2, b2, D):
    s = (b1 + b2) // 2
    g1, u1, v1 = _xgcd(a1, a2)
    e, x, w = _xgcd(g1, s)
    A = (a1 // e) * (a2 // e)
    m = 2 * abs(A)
    me = m * e
    u = (x * u1) % me
    v = (x * v1) % me
    t1 = (u * (a1 % me)) % me * (b2 % me) % me
    t2 = (v * (a2 % me)) % me * (b1 % me) % me
    t3 = (w % me) * (((b1 * b2 + D) // 2) % me) % me
    B = ((t1 + t2 + t3) % me) // e
    B = B % m
    if B > abs(A):
        B -= m
    C = (B * B - D) // (4 * A)
    return A, B, C


@njit(cache=True)
def _reduce_imag(a, b, c, D):
    while True:
        m = 2 * a
        b = b % m
        if b > a:
            b -= m
        c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if b < 0 and (a == c or -b == a):
            b = -b
        return a, b, c


@njit(cache=True)
def _mul_imag(a1, b1, a2, b2, D):
    A, B, C = _compose(a1, b1, a2, b2, D)
    return _reduce_imag(A, B, C, D)


@njit(cache=True)
def _pow_imag(a, b, c, n, D):
    ra = 1
    rb = D & 1
    rc = (rb * rb - D) // 4
    ba, bb, bc = a, b, c
    while n > 0:
        if n & 1:
            ra, rb, rc = _mul_imag(ra, rb, ba, bb, D)
        n >>= 1
        if n > 0:
            ba, bb, bc = _mul_imag(ba, bb, ba, bb, D)
    return ra, rb, rc


@njit(cache=True)
def _factor(n, spf, primes, ps, es):
    """Factor n into ps/es (prefix); returns the number of distinct primes."""
    k = 0
    if n < len(spf):
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            ps[k] = p
            es[k] = e
            k += 1
        return k
    for i in range(len(primes)):
        p = primes[i]
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            ps[k] = p
            es[k] = e
            k += 1
    if n > 1:
        # the prime list must reach sqrt(n) for this to be prime
        ps[k] = n
        es[k] = 1
        k += 1
    return k


@njit(cache=True)
def _divisors(k, ps, es, out):
    cnt = 1
    out[0] = 1
    for i in range(k):
        p = ps[i]
        base = cnt
        pk = 1
        for _ in range(es[i]):
            pk *= p
            for j in range(base):
                out[cnt] = out[j] * pk
                cnt += 1
    return cnt


@njit(cache=True)
def imag_torsion(D, m, spf, primes):
    """(h, #{f : f^m = 1}) for a negative fundamental discriminant D.

    m = 0 skips the torsion count. For m = 3 the test f^2 = f^-1 is used and
    inverse pairs are counted together.
    """
    absD = -D
    bmax = _isqrt(absD // 3)
    ps = np.zeros(32, dtype=np.int64)
    es = np.zeros(32, dtype=np.int64)
    divs = np.zeros(8192, dtype=np.int64)
    h = 0
    tors = 0
    b = absD & 1
    while b <= bmax:
        n = (b * b + absD) // 4
        k = _factor(n, spf, primes, ps, es)
        nd = _divisors(k, ps, es, divs)
        for i in range(nd):
            a = divs[i]
            if a < b or a * a > n or a == 0:
                continue
            c = n // a
            if b == 0 or a == b or a == c:
                h += 1
                if m > 0:
                    if a == 1:
                        tors += 1
                    elif m % 2 == 0:
                        # ambiguous classes have order 2
                        tors += 1
                continue
            h += 2
            if m == 3:
                sa, sb, sc = _mul_imag(a, b, a, b, D)
                if sa == a and sb == -b:
                    tors += 2
            elif m > 0:
                ra, rb, rc = _pow_imag(a, b, c, m, D)
                if ra == 1:
                    tors += 2
        b += 2
    return h, tors


@njit(cache=True)
def imag_h3_batch(Ds, spf, primes):
    out = np.zeros(len(Ds), dtype=np.int64)
    for i in range(len(Ds)):
        h, t = imag_torsion(Ds[i], 3, spf, primes)
        out[i] = t
    return out


# ---------------------------------------------------------------- real fields


@njit(cache=True)
def _is_reduced_real(a, b, D, s):
    if b <= 0 or b > s:
        return False
    t = 2 * abs(a)
    if (t + b) * (t + b) <= D:
        return False
    return t - b <= 0 or (t - b) * (t - b) < D


@njit(cache=True)
def _rho(a, b, c, D, s):
    ac = abs(c)
    m = 2 * ac
    if ac <= s:
        b2 = s - (s + b) % m
    else:
        b2 = (-b) % m
        if b2 > ac:
            b2 -= m
    return c, b2, (b2 * b2 - D) // (4 * c)


@njit(cache=True)
def _reduce_real(a, b, c, D, s):
    while not _is_reduced_real(a, b, D, s):
        a, b, c = _rho(a, b, c, D, s)
    return a, b, c


@njit(cache=True)
def _key(a, b, s):
    return (a + s + 1) * (s + 2) + b


@njit(cache=True)
def _powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(cache=True)
def _sqrt_mod_p(a, p):
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if p % 4 == 3:
        return _powmod(a, (p + 1) // 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while _powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    mm = s
    c = _powmod(z, q, p)
    t = _powmod(a, q, p)
    r = _powmod(a, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        bb = _powmod(c, 1 << (mm - i - 1), p)
        mm = i
        c = bb * bb % p
        t = t * c % p
        r = r * bb % p
    return r


@njit(cache=True)
def _walk(a, b, c, D, s, cid, index):
    a0, b0 = a, b
    while True:
        index[_key(a, b, s)] = cid
        a, b, c = _rho(a, b, c, D, s)
        if a == a0 and b == b0:
            return


@njit(cache=True)
def real_classes(D, primes):
    """Narrow class representatives (as an (h, 3) array) for D > 0 fundamental."""
    s = _isqrt(D)
    index = Dict.empty(key_type=types.int64, value_type=types.int64)
    reps = np.zeros((16, 3), dtype=np.int64)
    h = 0
    b0 = s if (s - D) % 2 == 0 else s - 1
    pa, pb, pc = _reduce_real(1, b0, (b0 * b0 - D) // 4, D, s)
    _walk(pa, pb, pc, D, s, 0, index)
    reps[0, 0], reps[0, 1], reps[0, 2] = pa, pb, pc
    h = 1
    gens = np.zeros((len(primes) + 2, 2), dtype=np.int64)
    ng = 0
    # sign class and prime forms of norm below sqrt(D)
    for i in range(-1, len(primes)):
        if i == -1:
            a, b = -1, b0
        else:
            p = primes[i]
            if p > s:
                break
            if p == 2:
                if D % 8 == 5:
                    continue
                if D % 2 == 1:
                    b = 1
                else:
                    b = 2 * ((D // 4) % 2)
            else:
                if D % p != 0 and _powmod(D % p, (p - 1) // 2, p) != 1:
                    continue
                b = _sqrt_mod_p(D, p)
                if (b - D) % 2 != 0:
                    b = p - b
            a = p
        c = (b * b - D) // (4 * a)
        ra, rb, rc = _reduce_real(a, b, c, D, s)
        k = _key(ra, rb, s)
        if k in index:
            continue
        if h == len(reps):
            reps = np.concatenate((reps, np.zeros((len(reps), 3), dtype=np.int64)))
        _walk(ra, rb, rc, D, s, h, index)
        reps[h, 0], reps[h, 1], reps[h, 2] = ra, rb, rc
        gens[ng, 0], gens[ng, 1] = ra, rb
        ng += 1
        h += 1
    # close under multiplication by the generators
    i = 0
    while i < h:
        for j in range(ng):
            A, B, C = _compose(reps[i, 0], reps[i, 1], gens[j, 0], gens[j, 1], D)
            ra, rb, rc = _reduce_real(A, B, C, D, s)
            k = _key(ra, rb, s)
            if k in index:
                continue
            if h == len(reps):
                reps = np.concatenate((reps, np.zeros((len(reps), 3), dtype=np.int64)))
            _walk(ra, rb, rc, D, s, h, index)
            reps[h, 0], reps[h, 1], reps[h, 2] = ra, rb, rc
            h += 1
        i += 1
    return reps[:h], index


@njit(cache=True)
def real_torsion(D, m, primes):
    """(h+, #{classes x : x^m = 1}) for D > 0 fundamental; m = 0 skips the count."""
    s = _isqrt(D)
    reps, index = real_classes(D, primes)
    h = len(reps)
    if m == 0:
        return h, 0
    tors = 0
    for i in range(h):
        ra, rb, rc = reps[0, 0], reps[0, 1], reps[0, 2]
        ba, bb = reps[i, 0], reps[i, 1]
        n = m
        while n > 0:
            if n & 1:
                A, B, C = _compose(ra, rb, ba, bb, D)
                ra, rb, rc = _reduce_real(A, B, C, D, s)
            n >>= 1
            if n > 0:
                A, B, C = _compose(ba, bb, ba, bb, D)
                ba, bb, bc = _reduce_real(A, B, C, D, s)
        if index[_key(ra, rb, s)] == 0:
            tors += 1
    return h, tors


@njit(cache=True)
def real_h3_batch(Ds, primes):
    out = np.zeros(len(Ds), dtype=np.int64)
    for i in range(len(Ds)):
        h, t = real_torsion(Ds[i], 3, primes)
        out[i] = t
    return out
