"""Criterion predicates at p = 3 and scans over quadratic, sextic and cubic twist families."""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import factorize, field_discriminant, is_fundamental_discriminant, kronecker, primes_up_to
from .characters import OMEGA, QuadraticCharacter, bernoulli1_ord3, psi0
from .classgroups import fundamental_discriminants, h3, h3_many
from .curves import (
    SexticTwist,
    WeierstrassCurve,
    conductor,
    is_semistable,
    mod3_characters,
    reduction_decomposition,
    sextic_curve,
)
from .eisenstein import congruence_rhs_trivial, isogeny_character_ok
from .rootnumbers import cubic_twist_root_number_108, quadratic_twist_root_number, sextic_root_number

P = 3
PREDICTIONS = ("rank0_over_Q", "rank1_over_Q", "rank1_over_K", "inconclusive")
HEEGNER_CAP = 10**4
MANIN_FLAG = "manin_constant_coprime_3"
DOMAINS = ("fundamental", "printed")


class CriterionError(ValueError):
    """A hypothesis of a criterion is violated by the input itself."""

    def __init__(self, hypothesis: str, detail: str):
        super().__init__(f"{hypothesis}: {detail}")
        self.hypothesis = hypothesis
        self.detail = detail


class SearchCapExhausted(LookupError):
    """No field satisfying the constraints was found up to the search cap.

    This never certifies that no such field exists.
    """

    def __init__(self, N: int, cap: int):
        super().__init__(f"no imaginary quadratic field with |d_K| <= {cap} satisfies the constraints for N = {N}")
        self.N = N
        self.cap = cap


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class Condition:
    id: str
    holds: bool
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CriterionReport:
    subject: str
    conditions: tuple[Condition, ...]
    prediction: str
    heegner_field: int | None = None
    assumed_flags: tuple[str, ...] = ()
    curve: WeierstrassCurve | None = None
    predicted_rank: int | None = None
    root_number: int | None = None

    def __post_init__(self):
        if self.prediction not in PREDICTIONS:
            raise ValueError(f"unknown prediction {self.prediction!r}")
        if self.prediction != "inconclusive" and not self.passed:
            raise ValueError("a definite prediction needs every condition to hold")

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.conditions)

    def condition(self, cid: str) -> Condition:
        for c in self.conditions:
            if c.id == cid:
                return c
        raise KeyError(cid)

    @property
    def failed(self) -> list[str]:
        return [c.id for c in self.conditions if not c.holds]

    @property
    def class_number_evidence(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.conditions:
            out.update(c.evidence.get("h3", {}))
        return out


@dataclass(frozen=True)
class TwistRecord:
    """One scanned discriminant: the row format of the JSONL output."""

    d: int
    family: str
    conditions: dict[str, bool]
    prediction: str
    heegner_field: int | None
    evidence: dict[int, int]
    rank: int | None = None
    root_number: int | None = None

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "family": self.family,
            "conditions": dict(self.conditions),
            "prediction": self.prediction,
            "heegner_field": self.heegner_field,
            "evidence": {str(k): v for k, v in sorted(self.evidence.items())},
        }


@dataclass(frozen=True)
class ValidPair:
    m: int
    M: int

    def __post_init__(self):
        if not valid_pair(self.m, self.M):
            raise ValueError(f"({self.m}, {self.M}) is not a valid pair")


@dataclass(frozen=True)
class DensityReport:
    family: str
    X: int
    sign: int | None
    total: int
    counts: dict[str, int]
    proportions: dict[str, float]
    statistic: str
    bound: Fraction
    slack: float
    passed: bool
    fit_constant: float | None = None

    def __post_init__(self):
        for k, v in self.proportions.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"proportion {k} = {v} outside [0, 1]")
        expect = self.proportions.get(self.statistic, 0.0) >= float(self.bound) * (1 - self.slack)
        if self.passed != expect:
            raise ValueError("passed flag disagrees with the bound comparison")

    @classmethod
    def build(cls, family, X, sign, total, counts, statistic, bound, slack, fit_constant=None) -> "DensityReport":
        props = {k: (v / total if total else 0.0) for k, v in counts.items()}
        ok = props.get(statistic, 0.0) >= float(bound) * (1 - slack)
        return cls(family, X, sign, total, dict(counts), props, statistic, Fraction(bound), slack, ok, fit_constant)

    @property
    def empirical(self) -> float:
        return self.proportions.get(self.statistic, 0.0)

    def to_row(self) -> dict:
        return {
            "family": self.family,
            "X": self.X,
            "sign": "" if self.sign is None else self.sign,
            "total": self.total,
            "statistic": self.statistic,
            "count": self.counts.get(self.statistic, 0),
            "empirical": f"{self.empirical:.6f}",
            "bound": f"{float(self.bound):.6f}",
            "slack": self.slack,
            "pass": int(self.passed),
            "fit_constant": "" if self.fit_constant is None else f"{self.fit_constant:.6f}",
        }


# ------------------------------------------------------------------ basic predicates


def _h3_entry(n: int) -> tuple[int, int]:
    D = field_discriminant(n)
    return D, h3(D)


def _prime_split(K: int, ell: int) -> bool:
    if ell == 2:
        return K % 8 == 1
    return kronecker(K, ell) == 1


def heegner_hypothesis(K: int, N: int) -> bool:
    """Every prime dividing N splits in Q(sqrt(K))."""
    if K >= 0:
        raise ValueError(f"K = {K} must be negative")
    if N == 1:
        return True
    return all(_prime_split(K, ell) for ell in factorize(abs(N)).primes())


def valid_pair(m: int, M: int) -> bool:
    """Admissibility of the congruence class m mod M for the 3-class number averages."""
    if m < 1 or M < 1:
        raise ValueError("m and M must be positive")
    g = math.gcd(m, M)
    if g > 1:
        for ell in factorize(g).primes():
            if ell % 2 and (M % (ell * ell) or m % (ell * ell) == 0):
                return False
    if M % 2 == 0:
        return (M % 4 == 0 and m % 4 == 1) or (M % 16 == 0 and m % 16 in (8, 12))
    return True


def _check_field(K: int) -> None:
    if K >= 0 or not is_fundamental_discriminant(K):
        raise CriterionError("imaginary_field", f"K = {K} is not a negative fundamental discriminant")
    if K % 2 == 0:
        raise CriterionError("odd_field_discriminant", f"K = {K} is even")
    if K in (-3, -4):
        raise CriterionError("extra_units", f"K = {K} has extra roots of unity")


# ------------------------------------------------------------------ the main criterion


def _case_nontrivial(E: WeierstrassCurve, psi: QuadraticCharacter, K: int, n_split: int, n_add: int) -> list[Condition]:
    conds = []
    a, b = psi(P), (psi * OMEGA)(P)
    conds.append(Condition("psi_at_3", a != 1 and b != 1, {"psi(3)": a, "psi_omega(3)": b}))
    conds.append(Condition("n_plus_trivial", n_split == 1, {"N_split": n_split}))
    p0 = psi0(psi, K)
    f = p0.conductor
    conds.append(Condition("psi0_conductor", f % (P * P) != 0, {"f(psi0)": f, "automatic": True}))
    bad = {}
    ok = True
    for ell in factorize(n_add).primes() if n_add > 1 else ():
        if ell == P:
            continue
        v = psi(ell)
        bad[ell] = v
        if not (v == 0 or (v != 1 and (ell - v) % P)):
            ok = False
    conds.append(Condition("additive_primes", ok, {"psi": bad}))
    chars = (p0 * QuadraticCharacter(K), p0 * OMEGA)
    ords = {}
    h3s = {}
    for chi in chars:
        ords[chi.discriminant] = bernoulli1_ord3(chi)
        h3s[chi.discriminant] = h3(chi.discriminant)
    conds.append(Condition("bernoulli", all(v == 0 for v in ords.values()), {"ord3": ords, "h3": h3s}))
    return conds


def _case_trivial(N: int, K: int) -> list[Condition]:
    conds = [Condition("psi_trivial", True)]
    conds.append(Condition("three_divides_N", N % P == 0, {"N": N}))
    bad = {}
    ok = True
    for ell in factorize(N).primes() if N > 1 else ():
        if ell == P:
            continue
        e = 0
        n = N
        while n % ell == 0:
            n //= ell
            e += 1
        bad[ell] = e
        if e != 1 or ell % P != P - 1:
            ok = False
    conds.append(Condition("other_primes", ok, {"exponents": bad}))
    if kronecker(K, P) != 1:
        conds.append(Condition("log_alpha", False, {"reason": "3 does not split in K"}))
    else:
        rhs = congruence_rhs_trivial(K)
        conds.append(
            Condition(
                "log_alpha",
                rhs.ord3 == 0,
                {"alpha": list(rhs.alpha), "class_number": rhs.class_number, "ord3": rhs.ord3, "precision": rhs.log.precision_exponent},
            )
        )
    return conds


def theorem_main_criterion(E: WeierstrassCurve, psi: QuadraticCharacter, K: int, subject: str | None = None) -> CriterionReport:
    """Non-triviality criterion for the Heegner point of E over Q(sqrt(K)) at p = 3.

    ``psi`` is the character with E[3]^ss = F_3(psi) + F_3(psi omega). The Heegner
    hypothesis and the splitting of 3 are recorded as conditions; malformed K
    or a psi inconsistent with E raise CriterionError.
    """
    _check_field(K)
    if not isogeny_character_ok(E, psi):
        raise CriterionError("isogeny_character", f"{psi!r} is not the mod-3 isogeny character of {E!r}")
    N = conductor(E)
    n_split, _, n_add = reduction_decomposition(E)
    conds = [
        Condition("heegner", heegner_hypothesis(K, N), {"N": N, "K": K}),
        Condition("three_split", kronecker(K, P) == 1, {"kronecker": kronecker(K, P)}),
    ]
    if psi.is_trivial:
        conds += _case_trivial(N, K)
    else:
        conds += _case_nontrivial(E, psi, K, n_split, n_add)
    passed = all(c.holds for c in conds)
    return CriterionReport(
        subject=subject or (E.label or repr(E)),
        conditions=tuple(conds),
        prediction="rank1_over_K" if passed else "inconclusive",
        heegner_field=K,
        assumed_flags=(MANIN_FLAG,),
        curve=E,
    )


# ------------------------------------------------------------------ Heegner field search


@dataclass(frozen=True)
class HeegnerConstraints:
    three_split: bool = False
    odd: bool = False
    below_minus4: bool = False
    h3_trivial_times: tuple[int, ...] = ()


def find_heegner_field(N: int, constraints: HeegnerConstraints | None = None, cap: int = HEEGNER_CAP) -> int:
    """Smallest |d_K| <= cap with every prime of N split in K and the extra constraints.

    Raises SearchCapExhausted when the range is exhausted.
    """
    c = constraints or HeegnerConstraints()
    primes = factorize(abs(N)).primes() if abs(N) > 1 else []
    for K in range(-3, -cap - 1, -1):
        if c.odd and K % 2 == 0:
            continue
        if c.below_minus4 and K >= -4:
            continue
        if not is_fundamental_discriminant(K):
            continue
        if c.three_split and kronecker(K, P) != 1:
            continue
        if not all(_prime_split(K, ell) for ell in primes):
            continue
        if all(h3(m * K) == 1 for m in c.h3_trivial_times):
            return K
    raise SearchCapExhausted(N, cap)


# ------------------------------------------------------------------ sextic family


def _sextic_d_conditions(d: int) -> list[Condition]:
    conds = [Condition("d_mod_9", d % 3 == 2 or d % 9 == 3, {"d mod 9": d % 9})]
    D, v = _h3_entry(-3 * d if d > 0 else d)
    conds.append(Condition("class_number_d", v == 1, {"h3": {D: v}}))
    return conds


def _sextic_product(d: int) -> int:
    """The multiplier m with the K-dependent condition h3(m * d_K) = 1."""
    return d if d > 0 else -3 * d


def sextic_criterion(d: int, K: int | None = None, cap: int = HEEGNER_CAP) -> CriterionReport:
    """Heegner criterion for E_d : y^2 = x^3 - 432 d over Q(sqrt(K)); K = None searches for one."""
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    conds = _sextic_d_conditions(d)
    N3d = 3 * abs(d)
    if K is None:
        if not all(c.holds for c in conds):
            conds.append(Condition("heegner", False, {"searched": False}))
            return CriterionReport(f"E_{d}", tuple(conds), "inconclusive", None, (MANIN_FLAG,))
        try:
            K = find_heegner_field(
                N3d,
                HeegnerConstraints(three_split=True, odd=True, below_minus4=True, h3_trivial_times=(_sextic_product(d),)),
                cap,
            )
        except SearchCapExhausted:
            conds.append(Condition("heegner", False, {"searched": True, "cap": cap}))
            return CriterionReport(f"E_{d}", tuple(conds), "inconclusive", None, (MANIN_FLAG,))
    if K >= 0 or not is_fundamental_discriminant(K):
        raise ValueError(f"K = {K} must be a negative fundamental discriminant")
    conds.append(Condition("heegner", heegner_hypothesis(K, N3d), {"N": N3d, "K": K}))
    conds.append(Condition("field_odd", K % 2 == 1 and K < -4, {"K": K}))
    D, v = _h3_entry(_sextic_product(d) * K)
    conds.append(Condition("class_number_dK", v == 1, {"h3": {D: v}}))
    passed = all(c.holds for c in conds)
    if not passed:
        return CriterionReport(f"E_{d}", tuple(conds), "inconclusive", K, (MANIN_FLAG,))
    w = sextic_root_number(d).w_global
    rank_q = _sextic_branch(d)[0]
    return CriterionReport(
        f"E_{d}", tuple(conds), "rank1_over_K", K, (MANIN_FLAG,), curve=sextic_curve(d), predicted_rank=rank_q, root_number=w
    )


def _sextic_branch(d: int) -> tuple[int, int]:
    first = (d > 0 and d % 9 == 2) or (d < 0 and d % 9 in (3, 5, 8))
    return (0, 1) if first else (1, 0)


def rank_prediction_sextic(d: int, K: int | None = None, report: CriterionReport | None = None) -> tuple[int, int]:
    """(rank of E_d over Q, rank of its twist by K) for d passing the sextic criterion."""
    report = report or sextic_criterion(d, K)
    if not report.passed:
        raise CriterionError("sextic_criterion", f"d = {d} fails {', '.join(report.failed)}")
    return _sextic_branch(d)


def _sextic_record(d: int, cap: int) -> TwistRecord:
    rep = sextic_criterion(d, None, cap)
    pred = "inconclusive"
    rank = None
    if rep.passed:
        rank = _sextic_branch(d)[0]
        pred = f"rank{rank}_over_Q"
    return TwistRecord(
        d, "sextic", {c.id: c.holds for c in rep.conditions}, pred, rep.heegner_field, rep.class_number_evidence, rank, rep.root_number
    )


def _sextic_chunk(args) -> list[TwistRecord]:
    ds, cap = args
    return [_sextic_record(int(d), cap) for d in ds]


def _chunks(arr: np.ndarray, n: int) -> list[np.ndarray]:
    return [c for c in np.array_split(arr, max(1, n)) if len(c)]


def _run(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def scan_sextic(X: int, cap: int = HEEGNER_CAP, workers: int = 1) -> list[TwistRecord]:
    """Sextic criterion for every fundamental 0 < |d| < X, ordered by (|d|, d)."""
    ds = fundamental_discriminants(-(X - 1), X - 1)
    ds = ds[np.argsort(np.abs(ds) * 2 + (ds > 0), kind="stable")]
    parts = _run(_sextic_chunk, [(c, cap) for c in _chunks(ds, 4 * workers)], workers)
    return [r for part in parts for r in part]


# ------------------------------------------------------------------ quadratic twists


def _printed_domain(lo: int, hi: int) -> np.ndarray:
    """Non-square d = 1 mod 4, and d = 4m with m squarefree, in [lo, hi]."""
    out = []
    for d in range(lo, hi + 1):
        if d == 0 or (d > 0 and math.isqrt(d) ** 2 == d):
            continue
        if d % 4 == 1:
            out.append(d)
        elif d % 4 == 0 and d // 4 not in (0, 1) and _squarefree(d // 4):
            out.append(d)
    return np.array(out, dtype=np.int64)


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n <= 1:
        return n == 1
    return all(e == 1 for _, e in factorize(n).pairs)


def _quadratic_setup(E: WeierstrassCurve):
    if not is_semistable(E):
        raise ValueError("quadratic twist scans need a semistable curve")
    if not isogeny_character_ok(E, QuadraticCharacter(1)):
        raise ValueError("E[3]^ss is not F_3 + F_3(omega)")
    N = conductor(E)
    n_split, n_nonsplit, _ = reduction_decomposition(E)
    split = [l for l in factorize(n_split).primes() if l != P] if n_split > 1 else []
    nonsplit = [l for l in factorize(n_nonsplit).primes() if l != P] if n_nonsplit > 1 else []
    return N, split, nonsplit


def evaluate_quadratic_twists(E: WeierstrassCurve, X: int, domain: str = "fundamental") -> list[TwistRecord]:
    """Conditions for every 0 < |d| < X in the domain, ordered by (|d|, d).

    Characters and class numbers are those of the field Q(sqrt(d)), so the
    "printed" domain (which admits some non-fundamental d) gives the same
    verdict as the field discriminant.
    """
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}")
    N, split, nonsplit = _quadratic_setup(E)
    if X <= 1:
        return []
    if domain == "fundamental":
        ds = fundamental_discriminants(-(X - 1), X - 1)
    else:
        ds = _printed_domain(-(X - 1), X - 1)
    ds = ds[np.argsort(np.abs(ds) * 2 + (ds > 0), kind="stable")]
    fields = np.array([field_discriminant(int(d)) for d in ds], dtype=np.int64)
    cl_disc = np.array([field_discriminant(int(-3 * f)) if f > 0 else int(f) for f in fields], dtype=np.int64)
    uniq, inv = np.unique(cl_disc, return_inverse=True)
    h3s = h3_many(uniq)[inv] if len(uniq) else np.zeros(0, dtype=np.int64)
    out = []
    w_cache: dict[int, int] = {}
    for d, f, D, v in zip(ds.tolist(), fields.tolist(), cl_disc.tolist(), h3s.tolist()):
        a, b = kronecker(f, P), kronecker(field_discriminant(-3 * f), P)
        conds = {
            "psi_at_3": a != 1 and b != 1,
            "split_primes": all(kronecker(f, l) == -1 for l in split),
            "nonsplit_primes": all(kronecker(f, l) == 1 for l in nonsplit),
            "class_number": v == 1,
        }
        rank = w = None
        pred = "inconclusive"
        if all(conds.values()):
            if f not in w_cache:
                w_cache[f] = quadratic_twist_root_number(E, f, N)
            w = w_cache[f]
            rank = (1 - w) // 2
            pred = f"rank{rank}_over_Q"
        out.append(TwistRecord(d, "quadratic", conds, pred, None, {D: v}, rank, w))
    return out


def scan_quadratic_twists(E: WeierstrassCurve, X: int, domain: str = "fundamental") -> list[tuple[int, int]]:
    """(d, predicted rank of E^(d)) for the d passing the twist conditions, ordered by (|d|, d)."""
    return [(r.d, r.rank) for r in evaluate_quadratic_twists(E, X, domain) if r.passed]


# ------------------------------------------------------------------ cubic twists


def _cubic_setup(d: int):
    twist = SexticTwist(d)
    E = twist.curve()
    N = conductor(E)
    psi, psi_omega = mod3_characters(twist)
    return E, N, psi, psi_omega


def cubic_prime_set(d: int, K: int, bound: int) -> list[int]:
    """Primes l <= bound, l not dividing 6 N(E_d), split in K, inert in Q(sqrt(d)), split in Q(sqrt(-3))."""
    _, N, psi, _ = _cubic_setup(d)
    out = []
    for ell in primes_up_to(bound):
        if (6 * N) % ell == 0:
            continue
        if kronecker(K, ell) == 1 and psi(ell) == -1 and OMEGA(ell) == 1:
            out.append(ell)
    return out


def cubic_hypotheses(d: int, K: int) -> list[Condition]:
    E, N, psi, psi_omega = _cubic_setup(d)
    conds = []
    bad = {l: (psi(l), psi_omega(l)) for l in factorize(N).primes()}
    conds.append(Condition("characters_at_N", all(a != 1 and b != 1 for a, b in bad.values()), {"psi": bad}))
    conds.append(Condition("heegner", heegner_hypothesis(K, N), {"N": N, "K": K}))
    conds.append(Condition("three_split", kronecker(K, P) == 1, {}))
    first = -3 * d if d > 0 else d
    second = d * K if d > 0 else -3 * d * K
    ev = dict([_h3_entry(first), _h3_entry(second)])
    conds.append(Condition("class_numbers", all(v == 1 for v in ev.values()), {"h3": ev}))
    return conds


def cubic_products(primes: list[int], X: int) -> list[int]:
    """Sorted squarefree products D < X of the given primes, D = 1 included."""
    primes = sorted(primes)
    out = []
    stack = [(1, 0)]
    while stack:
        n, i = stack.pop()
        out.append(n)
        for j in range(i, len(primes)):
            m = n * primes[j]
            if m >= X:
                break
            stack.append((m, j + 1))
    return sorted(out)


@dataclass(frozen=True)
class CubicTwist:
    D: int
    root_number: int | None
    rank: int | None


def cubic_twists(d: int, K: int, X: int) -> list[CubicTwist]:
    """Products D > 1 below X with their rank classes (rank known only for d = 108)."""
    conds = cubic_hypotheses(d, K)
    failed = [c.id for c in conds if not c.holds]
    if failed:
        raise CriterionError("cubic_hypotheses", f"d = {d}, K = {K} fails {', '.join(failed)}")
    primes = cubic_prime_set(d, K, X)
    out = []
    for D in cubic_products(primes, X)[1:]:
        if D % P != 1:
            raise AssertionError(f"product {D} is not 1 mod 3")
        w = cubic_twist_root_number_108(D) if d == 108 else None
        out.append(CubicTwist(D, w, None if w is None else (1 - w) // 2))
    return out


def _cubic_scale(x: float) -> float:
    return x / math.log(x) ** 0.875


def fit_cubic_constant(Ds: list[int], X: int, points: int = 16) -> float:
    """Least-squares c in #{D < x} ~ c x / log^{7/8} x over x geometric in [sqrt(X), X]."""
    xs = np.geomspace(math.sqrt(X), X, points)
    ys = np.array([bisect.bisect_left(Ds, x) for x in xs], dtype=float)
    gs = np.array([_cubic_scale(x) for x in xs])
    return float(ys @ gs / (gs @ gs))


def cubic_scan(d: int, K: int, X: int, slack: float = 0.05) -> DensityReport:
    twists = cubic_twists(d, K, X)
    Ds = [t.D for t in twists]
    counts = {"total": len(twists)}
    for t in twists:
        if t.rank is not None:
            key = f"rank{t.rank}"
            counts[key] = counts.get(key, 0) + 1
    for key in ("rank0", "rank1"):
        counts.setdefault(key, 0)
    c = fit_cubic_constant(Ds, X) if X > 16 else 0.0
    return DensityReport.build("cubic", X, None, len(twists), counts, "rank1", Fraction(0), slack, c)


# ------------------------------------------------------------------ density bounds


def _q(ell: int) -> int:
    return 4 if ell == 2 else ell


def _euler_phi(M: int) -> int:
    out = M
    for ell in factorize(M).primes() if M > 1 else ():
        out = out // ell * (ell - 1)
    return out


def realtwist_proportion_bound(n1: int, n2: int, n3: int) -> Fraction:
    """Proportion of d (per sign) meeting the twist conditions with trivial 3-class group."""
    N = n1 * n2 * n3
    r = 2 if N % 2 == 0 else 0
    out = Fraction(1, 2**r * 3)
    for ell in _primes(n1 * n2):
        if ell % 2 and ell != P:
            out *= Fraction(1, 2)
    for ell in _primes(n3):
        if ell % 2 and ell != P:
            out *= Fraction(1, ell)
    for ell in _primes(N):
        if ell != P:
            out *= Fraction(_q(ell), ell + 1)
    return out


def _primes(n: int) -> list[int]:
    return factorize(n).primes() if n > 1 else []


def proportion_lower_bound(E: WeierstrassCurve) -> dict[tuple[int, int], Fraction]:
    """Lower bounds keyed by (sign of d, rank of E^(d)) for semistable E with trivial isogeny character."""
    if not is_semistable(E):
        raise ValueError("only semistable curves are covered")
    n_split, n_nonsplit, _ = reduction_decomposition(E)
    base = realtwist_proportion_bound(n_split, n_nonsplit, 1)
    if n_nonsplit % P:
        return {(1, 1): base, (-1, 0): base}
    return {(1, 0): base / 4, (-1, 1): base / 4, (1, 1): base * 3 / 4, (-1, 0): base * 3 / 4}


SEXTIC_RANK_BOUND = Fraction(1, 6)
SEXTIC_CRITERION_BOUND = Fraction(1, 3)


def heegner_field_proportion_bound(E: WeierstrassCurve, d: int) -> Fraction:
    """Proportion of imaginary K (odd, Heegner for 3N, h3(d_0 d_K) = 1) guaranteed for the character of d."""
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    N = conductor(E)
    n_split, n_nonsplit, n_add = reduction_decomposition(E)
    if d > 0:
        d0 = d
    elif d % P:
        d0 = -3 * d
    else:
        d0 = -d // 3
    L = math.lcm(N, d * d)
    if L % 2:
        r = 1
    elif L % 4:
        r = 2
    else:
        L16 = math.lcm(L, 16)
        r = (L16 & -L16).bit_length() - 1 - 1
    s3 = 1 if (d > 0) == (d % P == 0) else 0
    out = Fraction(d0, 2 ** (r + s3) * 3)
    for ell in _primes(n_split * n_nonsplit):
        if d % ell and ell % 2 and ell != P:
            out *= Fraction(1, 2)
    for ell in _primes(n_add):
        if d % ell and ell % 2 and ell != P:
            out *= Fraction(1, 2)
    for ell in _primes(abs(d)):
        if ell % 2 and ell != P:
            out *= Fraction(1, 2 * ell)
    for ell in _primes(3 * N):
        out *= Fraction(_q(ell), ell + 1)
    return out


def nakagawa_horie_density(M: int = 1) -> float:
    """Asymptotic count / x of fundamental discriminants of one sign in a class mod M."""
    out = 3 / (math.pi**2 * _euler_phi(M))
    for ell in _primes(M):
        out *= _q(ell) / (ell + 1)
    return out


def taya_lower_bound(M: int, sign: int) -> Fraction:
    """Proportion of fields of the given sign with d = m mod M and trivial 3-torsion, for valid (m, M)."""
    out = Fraction(5, 6) if sign > 0 else Fraction(1, 2)
    out /= _euler_phi(M)
    for ell in _primes(M):
        out *= Fraction(_q(ell), ell + 1)
    return out


MEAN_H3_LIMITS = {1: Fraction(4, 3), -1: Fraction(2)}


def _h3_chunk(ds: np.ndarray) -> np.ndarray:
    return h3_many(ds)


def h3_table(X: int, sign: int, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(fundamental discriminants of one sign with |d| < X, their |Cl[3]|)."""
    ds = fundamental_discriminants(1, X - 1) if sign > 0 else fundamental_discriminants(-(X - 1), -1)[::-1]
    parts = _run(_h3_chunk, _chunks(ds, 8 * max(workers, 1)), workers)
    vals = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return ds, vals


def mean_h3(X: int, sign: int, workers: int = 1) -> float:
    _, vals = h3_table(X, sign, workers)
    return float(vals.mean()) if len(vals) else 0.0


DEFAULT_PAIRS = ((1, 1), (1, 3), (2, 3), (3, 9), (6, 9), (1, 4), (5, 8), (8, 16), (12, 16), (3, 3), (2, 4))


def taya_reports(X: int, pairs=DEFAULT_PAIRS, slack: float = 0.05, workers: int = 1) -> list[DensityReport]:
    """Trivial-3-torsion proportion per congruence class; invalid pairs are skipped."""
    out = []
    for sign in (1, -1):
        ds, vals = h3_table(X, sign, workers)
        total = len(ds)
        for m, M in pairs:
            if not valid_pair(m, M):
                continue
            mask = (ds % M) == (m % M)
            hit = int(np.count_nonzero(mask & (vals == 1)))
            counts = {"h3_trivial": hit, "in_class": int(np.count_nonzero(mask))}
            out.append(DensityReport.build(f"taya({m},{M})", X, sign, total, counts, "h3_trivial", taya_lower_bound(M, sign), slack))
    return out


def quadratic_density(E: WeierstrassCurve, X: int, slack: float = 0.05, records=None) -> list[DensityReport]:
    records = records if records is not None else evaluate_quadratic_twists(E, X)
    bounds = proportion_lower_bound(E)
    out = []
    for sign in (1, -1):
        rows = [r for r in records if (r.d > 0) == (sign > 0)]
        counts = {"rank0": 0, "rank1": 0}
        for r in rows:
            if r.rank is not None:
                counts[f"rank{r.rank}"] += 1
        rank = max((k for k in bounds if k[0] == sign), key=lambda k: bounds[k])[1]
        out.append(DensityReport.build("quadratic", X, sign, len(rows), counts, f"rank{rank}", bounds[(sign, rank)], slack))
    return out


def sextic_density(X: int, slack: float = 0.1, cap: int = HEEGNER_CAP, workers: int = 1, records=None) -> list[DensityReport]:
    records = records if records is not None else scan_sextic(X, cap, workers)
    out = []
    for sign in (1, -1):
        rows = [r for r in records if (r.d > 0) == (sign > 0)]
        counts = {"assigned": 0, "rank0": 0, "rank1": 0}
        for r in rows:
            if r.rank is not None:
                counts["assigned"] += 1
                counts[f"rank{r.rank}"] += 1
        out.append(DensityReport.build("sextic", X, sign, len(rows), counts, "assigned", SEXTIC_RANK_BOUND, slack))
    return out


FAMILIES = ("quadratic", "sextic", "cubic", "taya")


def density_report(family: str, X: int, *, curve: WeierstrassCurve | None = None, d: int = 108, K: int = -23,
                   slack: float = 0.05, workers: int = 1) -> list[DensityReport]:
    if family == "quadratic":
        if curve is None:
            raise ValueError("the quadratic family needs a curve")
        return quadratic_density(curve, X, slack)
    if family == "sextic":
        return sextic_density(X, slack, workers=workers)
    if family == "cubic":
        return [cubic_scan(d, K, X, slack)]
    if family == "taya":
        return taya_reports(X, slack=slack, workers=workers)
    raise ValueError(f"family must be one of {FAMILIES}")
