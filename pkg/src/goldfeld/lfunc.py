"""Numerical L(E,1) and L'(E,1) from Hecke coefficients, with rigorous tail bounds."""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import WeierstrassCurve, an_list, conductor

LD = np.longdouble
EULER_GAMMA = LD("0.577215664901532860606512090082402431")
CONDUCTOR_LIMIT = 10**7
VANISH_FLOOR = 1e-8
SIGN_T = 1.2


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class LValueEstimate:
    value: float
    truncation_bound: int
    error_bound: float
    root_number_used: int

    def vanishes(self) -> bool:
        return abs(self.value) <= max(VANISH_FLOOR, 100 * self.error_bound)

    def nonzero(self) -> bool:
        return abs(self.value) > 10 * self.error_bound and abs(self.value) > VANISH_FLOOR


def exp_integral_e1(x) -> np.ndarray:
    """E_1(x) for x > 0 in extended precision (power series below 1, continued fraction above)."""
    x = np.atleast_1d(np.asarray(x, dtype=LD))
    if np.any(x <= 0):
        raise ValueError("E_1 kernel needs x > 0")
    out = np.empty_like(x)
    small = x <= 1
    if small.any():
        xs = x[small]
        term = np.ones_like(xs)
        total = np.zeros_like(xs)
        for k in range(1, 40):
            term = term * (-xs) / k
            total += term / k
        out[small] = -EULER_GAMMA - np.log(xs) - total
    big = ~small
    if big.any():
        xb = x[big]
        # modified Lentz on E_1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        tiny = LD(1e-300)
        b = xb + 1
        c = np.full_like(xb, 1 / tiny)
        d = 1 / b
        h = d.copy()
        for i in range(1, 200):
            an = LD(-i * i)
            b = b + 2
            d = 1 / (an * d + b)
            c = b + an / c
            delta = c * d
            h = h * delta
            if np.all(np.abs(delta - 1) < LD(1e-19)):
                break
        out[big] = h * np.exp(-xb)
    return out


def _tail(N: int, nmax: int, scale: float = 1.0) -> float:
    """Bound for 2 * sum_{n > nmax} |a_n|/n K(2 pi n scale/sqrt N) with K <= e^{-x} and |a_n| <= 2n."""
    c = 2 * math.pi * scale / math.sqrt(N)
    return 4 * math.exp(-c * (nmax + 1)) / (1 - math.exp(-c))


def _rounding(terms: np.ndarray) -> float:
    return float(np.abs(terms).sum()) * len(terms) * float(np.finfo(LD).eps) * 4


def default_nmax(N: int) -> int:
    return int(math.ceil(10 * math.sqrt(N))) + 10


def _coeffs(curve, N, nmax, a=None):
    if N > CONDUCTOR_LIMIT:
        raise InfeasibleError(f"conductor {N} exceeds series limit {CONDUCTOR_LIMIT}")
    if nmax < 10 * math.sqrt(N):
        raise ValueError("n_max must be at least 10 sqrt(N)")
    if a is None:
        a = an_list(curve, nmax)
    a = np.asarray(a[1 : nmax + 1], dtype=LD)
    n = np.arange(1, nmax + 1, dtype=LD)
    return a / n, n


def l_value_at_1(curve: WeierstrassCurve, N: int | None = None, n_max: int | None = None, w: int = 1, a=None) -> LValueEstimate:
    if w != 1:
        raise ValueError("L(E,1) series needs root number +1 (it vanishes identically for -1)")
    N = N or conductor(curve)
    n_max = n_max or default_nmax(N)
    coeff, n = _coeffs(curve, N, n_max, a)
    terms = 2 * coeff * np.exp(-2 * LD(math.pi) * n / np.sqrt(LD(N)))
    err = _tail(N, n_max) + _rounding(terms)
    return LValueEstimate(float(terms.sum()), n_max, err, 1)


def l_derivative_at_1(curve: WeierstrassCurve, N: int | None = None, n_max: int | None = None, w: int = -1, a=None) -> LValueEstimate:
    if w != -1:
        raise ValueError("L'(E,1) series needs root number -1")
    N = N or conductor(curve)
    n_max = n_max or default_nmax(N)
    coeff, n = _coeffs(curve, N, n_max, a)
    terms = 2 * coeff * exp_integral_e1(2 * LD(math.pi) * n / np.sqrt(LD(N)))
    err = _tail(N, n_max) + _rounding(terms)
    return LValueEstimate(float(terms.sum()), n_max, err, -1)


def sign_residual(a, N: int, w: int, n_max: int) -> float:
    """|S_w(1) - S_w(t)|, where S_w(t) = sum (a_n/n)(e^{-2 pi n t/sqrt N} + w e^{-2 pi n/(t sqrt N)})."""
    coeff = np.asarray(a[1 : n_max + 1], dtype=LD) / np.arange(1, n_max + 1, dtype=LD)
    x = 2 * LD(math.pi) * np.arange(1, n_max + 1, dtype=LD) / np.sqrt(LD(N))

    def S(t):
        t = LD(t)
        return (coeff * (np.exp(-x * t) + w * np.exp(-x / t))).sum()

    return float(abs(S(1) - S(SIGN_T)))


def infer_root_number(curve: WeierstrassCurve, N: int | None = None, a=None) -> int | None:
    """Root number for which the functional equation holds numerically; None if undecided."""
    N = N or conductor(curve)
    n_max = int(default_nmax(N) * SIGN_T) + 1
    if a is None or len(a) <= n_max:
        a = an_list(curve, n_max)
    plus = sign_residual(a, N, 1, n_max)
    minus = sign_residual(a, N, -1, n_max)
    tol = 10 * _tail(N, n_max, 1 / SIGN_T) + 1e-12
    if plus < tol and minus > 1e3 * tol:
        return 1
    if minus < tol and plus > 1e3 * tol:
        return -1
    return None


@dataclass(frozen=True)
class RankVerification:
    label: str
    conductor: int
    root_number: int
    predicted_rank: int | None
    l_value: LValueEstimate | None
    l_derivative: LValueEstimate | None
    verdict: str
    inferred_root_number: int | None = None


def verify_rank(curve: WeierstrassCurve, predicted_rank: int, w: int, N: int | None = None, a=None, label: str = "") -> RankVerification:
    """Check a rank-0 or rank-1 prediction against the series for L(1) and L'(1)."""
    N = N or conductor(curve)
    if N > CONDUCTOR_LIMIT:
        raise InfeasibleError(f"conductor {N} exceeds series limit {CONDUCTOR_LIMIT}")
    n_max = default_nmax(N)
    if a is None:
        a = an_list(curve, n_max)
    lv = l_value_at_1(curve, N, n_max, a=a) if w == 1 else None
    ld = l_derivative_at_1(curve, N, n_max, a=a) if w == -1 else None
    if predicted_rank == 0:
        if w == -1:
            verdict = "refuted"
        elif lv.nonzero():
            verdict = "confirmed"
        elif lv.vanishes():
            verdict = "refuted"
        else:
            verdict = "numerically_ambiguous"
    elif predicted_rank == 1:
        if w == 1:
            verdict = "refuted"
        elif ld.nonzero():
            verdict = "confirmed"
        elif ld.vanishes():
            verdict = "refuted"
        else:
            verdict = "numerically_ambiguous"
    else:
        raise ValueError("only rank 0 and rank 1 predictions are checked")
    return RankVerification(label or (curve.label or str(curve.ainvs)), N, w, predicted_rank, lv, ld, verdict)


def check_twist(curve: WeierstrassCurve, w: int, predicted_rank: int | None = None, N: int | None = None,
                label: str = "") -> RankVerification:
    """Closed-form sign against the functional equation, then the rank prediction if one is made.

    A sign contradicting the series is a refutation. Without a rank prediction
    the verdict is sign_confirmed or sign_undecided.
    """
    N = N or conductor(curve)
    if N > CONDUCTOR_LIMIT:
        raise InfeasibleError(f"conductor {N} exceeds series limit {CONDUCTOR_LIMIT}")
    n_max = int(default_nmax(N) * SIGN_T) + 1
    a = an_list(curve, n_max)
    inferred = infer_root_number(curve, N, a)
    label = label or (curve.label or str(curve.ainvs))
    if inferred is not None and inferred != w:
        return RankVerification(label, N, w, predicted_rank, None, None, "refuted", inferred)
    if predicted_rank is None:
        lv = l_value_at_1(curve, N, a=a) if w == 1 else None
        ld = l_derivative_at_1(curve, N, a=a) if w == -1 else None
        verdict = "sign_confirmed" if inferred == w else "sign_undecided"
        return RankVerification(label, N, w, None, lv, ld, verdict, inferred)
    rv = verify_rank(curve, predicted_rank, w, N, a, label)
    return dataclasses.replace(rv, inferred_root_number=inferred)


def verify_rank_prediction(report) -> str:
    """Verdict for a report carrying ``curve``, ``predicted_rank`` and ``root_number``."""
    if report.predicted_rank is None:
        raise ValueError("report has no rank prediction")
    return check_twist(report.curve, report.root_number, report.predicted_rank).verdict


CSV_FIELDS = ["d", "N", "w", "w_inferred", "rank", "L1", "L1err", "Lp1", "Lp1err", "verdict"]


def write_report(rows: list[tuple[int, RankVerification]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(CSV_FIELDS)
        for d, r in rows:
            lv, ld = r.l_value, r.l_derivative
            out.writerow([
                d, r.conductor, r.root_number,
                "" if r.inferred_root_number is None else r.inferred_root_number,
                "" if r.predicted_rank is None else r.predicted_rank,
                "" if lv is None else repr(lv.value), "" if lv is None else repr(lv.error_bound),
                "" if ld is None else repr(ld.value), "" if ld is None else repr(ld.error_bound),
                r.verdict,
            ])
