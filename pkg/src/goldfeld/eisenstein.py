"""Weight-2 Eisenstein q-expansions, stabilization operators and the two congruence right-hand sides at p = 3."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arith import factorize, hensel_sqrt, is_fundamental_discriminant, kronecker, primes_up_to, valuation
from .characters import OMEGA, QuadraticCharacter, bernoulli1, character_table, psi0
from .classgroups import class_group
from .curves import WeierstrassCurve, an_list, reduction_decomposition

P = 3
MODES = ("plus", "minus", "zero_good", "zero_bad")


@dataclass(frozen=True)
class QExpansion:
    """constant_term + sum_{n=1}^{bound} a_n q^n; coefficients[0] is unused and kept at 0."""

    constant_term: Fraction
    coefficients: np.ndarray
    modulus: int = 0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=object)
        if len(c) < 2:
            raise ValueError("q-expansion needs bound >= 1")
        c[0] = 0
        if self.modulus:
            c = np.array([int(x) % self.modulus for x in c], dtype=object)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "constant_term", Fraction(self.constant_term))

    @property
    def bound(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> int:
        return int(self.coefficients[n])

    def reduce(self, m: int) -> "QExpansion":
        const = self.constant_term
        if const.denominator % m == 0:
            const = Fraction(0)
        else:
            const = Fraction(const.numerator * pow(const.denominator, -1, m) % m)
        return QExpansion(const, self.coefficients, m)

    def truncate(self, bound: int) -> "QExpansion":
        return QExpansion(self.constant_term, self.coefficients[: bound + 1], self.modulus)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["n", "a_n"])
            out.writerow([0, str(self.constant_term)])
            for n in range(1, self.bound + 1):
                out.writerow([n, int(self.coefficients[n])])

    @classmethod
    def from_csv(cls, path: str | Path, modulus: int = 0) -> "QExpansion":
        const = Fraction(0)
        coeffs: dict[int, int] = {}
        with open(path, newline="") as fh:
            rows = csv.reader(fh)
            header = next(rows)
            if [h.strip() for h in header] != ["n", "a_n"]:
                raise ValueError(f"expected header n,a_n in {path}")
            for lineno, row in enumerate(rows, start=2):
                try:
                    n = int(row[0])
                    if n == 0:
                        const = Fraction(row[1])
                    else:
                        coeffs[n] = int(row[1])
                except (ValueError, IndexError):
                    raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
        bound = max(coeffs, default=0)
        if sorted(coeffs) != list(range(1, bound + 1)):
            raise ValueError(f"{path}: coefficients must cover 1..{bound} without gaps")
        arr = np.zeros(bound + 1, dtype=object)
        for n, a in coeffs.items():
            arr[n] = a
        return cls(const, arr, modulus)

    @classmethod
    def from_coefficients(cls, coeffs, constant_term=Fraction(0)) -> "QExpansion":
        arr = np.zeros(len(coeffs), dtype=object)
        arr[1:] = [int(x) for x in coeffs[1:]]
        return cls(constant_term, arr)


def eisenstein_E2_psi(psi: QuadraticCharacter, bound: int) -> QExpansion:
    """E_{2,psi}: a_n = sum_{e | n} psi(n/e) psi(e) e; constant -1/24 for trivial psi, else 0."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if psi.is_trivial:
        chi = np.ones(bound + 1, dtype=np.int64)
    else:
        chi = character_table(psi.discriminant, bound + 1).astype(np.int64)
    a = np.zeros(bound + 1, dtype=np.int64)
    for e in range(1, bound + 1):
        if chi[e] == 0:
            continue
        m = np.arange(e, bound + 1, e)
        a[m] += chi[m // e] * chi[e] * e
    const = Fraction(-1, 24) if psi.is_trivial else Fraction(0)
    return QExpansion(const, a.astype(object))


def _shift(coeffs: np.ndarray, step: int) -> np.ndarray:
    """Coefficients of F(q^step) without constant term."""
    out = np.zeros(len(coeffs), dtype=object)
    idx = np.arange(0, len(coeffs), step)
    out[idx] = coeffs[idx // step]
    return out


def stabilize(F: QExpansion, ell: int, mode: str, alpha=None, beta=None, check: bool = True) -> QExpansion:
    """Weight-2 stabilization at ell.

    plus:      F - beta F(q^ell)
    minus:     F - alpha F(q^ell)
    zero_good: F - (alpha + beta) F(q^ell) + ell F(q^{ell^2})
    zero_bad:  F - a_ell(F) F(q^ell)

    ``check`` compares alpha + beta with a_ell(F); turn it off when F has
    already been stabilized at ell.
    """
    if mode not in MODES:
        raise ValueError(f"unknown stabilization mode {mode!r}")
    c = F.coefficients
    const = F.constant_term
    if mode == "zero_bad":
        a_ell = F[ell] if ell <= F.bound else 0
        new = c - a_ell * _shift(c, ell)
        const = const - a_ell * const
    else:
        if alpha is None or beta is None:
            raise ValueError(f"mode {mode} needs alpha and beta")
        if check and ell <= F.bound and not F.modulus and alpha + beta != F[ell]:
            raise ValueError(f"alpha + beta = {alpha + beta} but a_{ell}(F) = {F[ell]}")
        if alpha * beta != ell:
            raise ValueError(f"alpha * beta = {alpha * beta} must equal {ell}")
        if mode == "plus":
            new = c - beta * _shift(c, ell)
            const = const * (1 - beta)
        elif mode == "minus":
            new = c - alpha * _shift(c, ell)
            const = const * (1 - alpha)
        else:
            new = c - (alpha + beta) * _shift(c, ell) + ell * _shift(c, ell * ell)
            const = const * (1 - (alpha + beta) + ell)
    return QExpansion(const, new, F.modulus)


def theta(F: QExpansion) -> QExpansion:
    n = np.arange(len(F.coefficients), dtype=object)
    return QExpansion(Fraction(0), F.coefficients * n, F.modulus)


@dataclass(frozen=True)
class StabilizationPlan:
    psi: QuadraticCharacter
    steps: tuple[tuple[int, str], ...]


def stabilization_plan(E: WeierstrassCurve, psi: QuadraticCharacter) -> StabilizationPlan:
    """Mode per prime of N: split -> plus, nonsplit -> minus, additive -> zero (good or bad for psi)."""
    n_split, n_nonsplit, n_add = reduction_decomposition(E)
    steps = []
    for ell in factorize(n_split).primes():
        steps.append((ell, "plus"))
    for ell in factorize(n_nonsplit).primes():
        steps.append((ell, "minus"))
    for ell in factorize(n_add).primes():
        steps.append((ell, "zero_bad" if psi.conductor % ell == 0 else "zero_good"))
    return StabilizationPlan(psi, tuple(sorted(steps)))


def stabilized_eisenstein(plan: StabilizationPlan, bound: int) -> QExpansion:
    psi = plan.psi
    F = eisenstein_E2_psi(psi, bound)
    for ell, mode in plan.steps:
        a = psi(ell)
        F = stabilize(F, ell, mode, alpha=a, beta=a * ell) if mode != "zero_bad" else stabilize(F, ell, mode)
    return F


def check_eisenstein_congruence(E: WeierstrassCurve, psi: QuadraticCharacter, bound: int, j: int = 1, a=None) -> tuple[bool, int | None]:
    """theta^j f = theta^j E_{2,psi}^{(N+,N-,N0)} mod 3, coefficientwise up to bound.

    ``a`` overrides the curve's Hecke coefficients (a[n] for n <= bound).
    """
    if not isogeny_character_ok(E, psi):
        raise ValueError("psi is not a character of the semisimplified mod-3 representation")
    if a is None:
        a = an_list(E, bound)
    G = stabilized_eisenstein(stabilization_plan(E, psi), bound)
    for n in range(1, bound + 1):
        w = pow(n, j, P)
        if (w * (int(a[n]) - G[n])) % P:
            return False, n
    return True, None


def isogeny_character_ok(E: WeierstrassCurve, psi: QuadraticCharacter, sample: int = 200) -> bool:
    """a_l = psi(l)(1 + l) mod 3 at good primes l not 3, up to a sample bound."""
    a = an_list(E, sample)
    disc = E.discriminant
    for ell in primes_up_to(sample):
        if ell == 3 or disc % ell == 0:
            continue
        if (int(a[ell]) - psi(ell) * (1 + ell)) % 3:
            return False
    return True


@dataclass(frozen=True)
class NontrivialRHS:
    ord3: float
    unit_part_up_to_sign: int
    three_integral: bool
    euler_factor: Fraction
    bernoulli_values: tuple[Fraction, Fraction] | None


def congruence_rhs_nontrivial(E: WeierstrassCurve, psi: QuadraticCharacter, K: int) -> NontrivialRHS:
    """3-adic size of the right-hand side for psi nontrivial; the overall sign is left unresolved."""
    if psi.is_trivial:
        raise ValueError("psi must be nontrivial")
    if K >= 0 or not is_fundamental_discriminant(K):
        raise ValueError(f"K = {K} must be a negative fundamental discriminant")
    if kronecker(K, P) != 1:
        raise ValueError(f"3 does not split in Q(sqrt({K}))")
    n_split, n_nonsplit, n_add = reduction_decomposition(E)
    euler = Fraction(1)
    for ell in factorize(n_split).primes():
        if ell != P:
            euler *= 1 - psi(ell)
    for ell in factorize(n_nonsplit).primes():
        if ell != P:
            euler *= 1 - Fraction(psi(ell), ell)
    for ell in factorize(n_add).primes():
        if ell != P:
            euler *= (1 - psi(ell)) * (1 - Fraction(psi(ell), ell))
    euler *= Fraction(1, 4) * (1 - psi(P)) * (1 - (psi * OMEGA)(P))
    p0 = psi0(psi, K)
    chi1 = p0 * QuadraticCharacter(K)
    chi2 = p0 * OMEGA
    if OMEGA in (chi1, chi2) or chi1.is_trivial or chi2.is_trivial:
        return NontrivialRHS(-math.inf, 0, False, euler, None)
    b1, b2 = bernoulli1(chi1), bernoulli1(chi2)
    value = euler * b1 * b2
    if value == 0:
        return NontrivialRHS(math.inf, 0, True, euler, (b1, b2))
    v = valuation(value, P)
    return NontrivialRHS(v, 1, v >= 0, euler, (b1, b2))


@dataclass(frozen=True)
class PadicApprox:
    """Value known modulo 3**precision_exponent; valuation is only certified when below the precision."""

    residue: int
    precision_exponent: int
    valuation: int

    def __post_init__(self):
        if not 0 <= self.residue < P**self.precision_exponent:
            raise ValueError("residue out of range")

    @property
    def certified(self) -> bool:
        return self.valuation < self.precision_exponent


def _val_mod(x: int, k: int) -> int:
    x %= P**k
    if x == 0:
        return k
    v = 0
    while x % P == 0:
        x //= P
        v += 1
    return v


def iwasawa_log3(u: int, k: int) -> PadicApprox:
    """Iwasawa logarithm of the 3-adic unit u modulo 3^k, as log(u^2)/2 via the power series."""
    if u % P == 0:
        raise ValueError("u must be a 3-adic unit")
    # x = u^2 - 1 has valuation >= 1; term x^n/n has valuation >= n - log_3(n)
    nterms = k + 1
    while nterms - math.log(nterms, P) < k:
        nterms += 1
    nterms += 2
    extra = int(math.log(nterms, P)) + 2
    mod = P ** (k + extra)
    x = (u * u - 1) % mod
    vx = _val_mod(x, k + extra)
    total = Fraction(0)
    xn = 1
    for n in range(1, nterms + 1):
        xn = xn * x % mod
        if vx * n - valuation(n, P) >= k + extra:
            continue
        total += Fraction((-1) ** (n + 1) * xn, n)
    half = total / 2
    m = P**k
    res = half.numerator * pow(half.denominator, -1, m) % m
    return PadicApprox(res, k, _val_mod(res, k))


@dataclass(frozen=True)
class TrivialRHS:
    K: int
    class_number: int
    alpha: tuple[int, int]
    log: PadicApprox
    ord3: int


def norm_equation_generator(K: int, h: int) -> tuple[int, int]:
    """(a, b) with a^2 - K b^2 = 4 * 3^h and (a + b sqrt K)/2 not divisible by 3."""
    target = 4 * P**h
    bmax = int(2 * math.sqrt(P**h / abs(K))) + 1
    for b in range(0, bmax + 1):
        a2 = target + K * b * b
        if a2 < 0:
            break
        a = math.isqrt(a2)
        if a * a != a2 or (a - b * K) % 2:
            continue
        if a % P == 0 and b % P == 0:
            continue
        return a, b
    raise ValueError(f"no generator of norm 3^{h} found in Q(sqrt({K})); raise the search bound")


def congruence_rhs_trivial(K: int, k: int = 20, max_k: int = 80) -> TrivialRHS:
    """ord_3 of (p-1)/(2p) log_3(alpha-bar), with (alpha) = p^{h_K} for a prime p above 3."""
    if K >= -4 or not is_fundamental_discriminant(K):
        raise ValueError(f"K = {K} must be a fundamental discriminant below -4")
    if kronecker(K, P) != 1:
        raise ValueError(f"3 is not split in Q(sqrt({K}))")
    h = class_group(K).h
    a, b = norm_equation_generator(K, h)
    while True:
        m = P ** (k + 1)
        r = hensel_sqrt(K, P, k + 1)
        inv2 = pow(2, -1, m)
        images = [(a + b * r) * inv2 % m, (a - b * r) * inv2 % m]
        units = [x for x in images if x % P]
        if len(units) != 1:
            raise ArithmeticError("expected exactly one 3-adic unit among the conjugates")
        log = iwasawa_log3(units[0], k)
        if log.certified or k >= max_k:
            return TrivialRHS(K, h, (a, b), log, -1 + log.valuation)
        k = min(2 * k, max_k)
