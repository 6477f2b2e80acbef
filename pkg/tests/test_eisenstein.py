import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldfeld.arith import is_fundamental_discriminant, valuation
from goldfeld.characters import OMEGA, QuadraticCharacter, psi0
from goldfeld.classgroups import class_group
from goldfeld.curves import BUILTIN_CURVES, an_list, sextic_curve
from goldfeld.curves.sextic import mod3_characters
from goldfeld.eisenstein import (
    PadicApprox,
    QExpansion,
    check_eisenstein_congruence,
    congruence_rhs_nontrivial,
    congruence_rhs_trivial,
    eisenstein_E2_psi,
    iwasawa_log3,
    norm_equation_generator,
    stabilization_plan,
    stabilize,
    theta,
)

TRIV = QuadraticCharacter(1)
PSI_M4 = QuadraticCharacter(-4)
E19 = BUILTIN_CURVES["19a1"]
BOUND = 1000


def sigma_twisted(psi, n):
    return sum(psi(n // e) * psi(e) * e for e in range(1, n + 1) if n % e == 0)


def log3_oracle(u: int, k: int) -> int:
    """log(u) = lim (u^(2*3^n) - 1) / (2*3^n), truncated far enough to be exact mod 3^k."""
    n = 2 * k + 4
    m = 3 ** (k + n + 2)
    t = (pow(u * u, 3**n, m) - 1) % m
    assert t % 3**n == 0
    return (t // 3**n) * pow(2, -1, 3**k) % 3**k


# ------------------------------------------------------------------ E_{2,psi}


def test_e2_examples():
    assert eisenstein_E2_psi(TRIV, 10)[6] == 12
    assert eisenstein_E2_psi(PSI_M4, 10)[5] == 6
    assert eisenstein_E2_psi(PSI_M4, 10)[2] == 0
    assert eisenstein_E2_psi(TRIV, 5).constant_term == Fraction(-1, 24)
    assert eisenstein_E2_psi(PSI_M4, 5).constant_term == 0


@pytest.mark.parametrize("D", [1, -4, 5, -3, 8, -23, 12])
def test_e2_matches_divisor_sum(D):
    psi = QuadraticCharacter(D)
    F = eisenstein_E2_psi(psi, 120)
    assert [F[n] for n in range(1, 121)] == [sigma_twisted(psi, n) for n in range(1, 121)]


def test_e2_rejects_zero_bound():
    with pytest.raises(ValueError):
        eisenstein_E2_psi(TRIV, 0)


def test_theta():
    F = eisenstein_E2_psi(TRIV, 20)
    assert theta(F)[6] == 72
    T2 = theta(theta(F))
    assert all(T2[n] == n * n * F[n] for n in range(1, 21))
    assert theta(F).constant_term == 0


# ------------------------------------------------------------------ stabilization

ALPHA_BETA = st.sampled_from(["triv_ab", "triv_ba", "neg_ab", "neg_ba"])
GOOD_PRIMES = st.sampled_from([2, 5, 7, 11, 13])


def _pair(kind, ell):
    return {"triv_ab": (1, ell), "triv_ba": (ell, 1), "neg_ab": (-1, -ell), "neg_ba": (-ell, -1)}[kind]


def _base(kind, ell):
    # trivial character has a_ell = 1 + ell; the sign-flipped pairs pair with psi(ell) = -1
    if kind.startswith("triv"):
        return eisenstein_E2_psi(TRIV, BOUND)
    D = next(D for D in (-4, 5, -7, 8, -3, 12, 13, -19) if QuadraticCharacter(D)(ell) == -1)
    return eisenstein_E2_psi(QuadraticCharacter(D), BOUND)


def _same(F, G):
    return F.constant_term == G.constant_term and all(F[n] == G[n] for n in range(1, F.bound + 1))


@settings(max_examples=30, deadline=None)
@given(GOOD_PRIMES, ALPHA_BETA)
def test_plus_stabilization_eigenvalue(ell, kind):
    alpha, beta = _pair(kind, ell)
    F = _base(kind, ell)
    G = stabilize(F, ell, "plus", alpha, beta)
    assert G[1] == 1
    assert G[ell] == alpha
    H = stabilize(F, ell, "minus", alpha, beta)
    assert H[ell] == beta


@settings(max_examples=30, deadline=None)
@given(GOOD_PRIMES, ALPHA_BETA)
def test_zero_good_kills_ell(ell, kind):
    alpha, beta = _pair(kind, ell)
    G = stabilize(_base(kind, ell), ell, "zero_good", alpha, beta)
    assert G[ell] == 0
    assert all(G[ell * m] == 0 for m in range(1, BOUND // ell + 1))


@settings(max_examples=30, deadline=None)
@given(GOOD_PRIMES, ALPHA_BETA)
def test_plus_then_minus_is_zero_good(ell, kind):
    alpha, beta = _pair(kind, ell)
    F = _base(kind, ell)
    both = stabilize(stabilize(F, ell, "plus", alpha, beta), ell, "minus", alpha, beta, check=False)
    assert _same(both, stabilize(F, ell, "zero_good", alpha, beta))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 5, 7]), st.sampled_from([11, 13, 17]), st.sampled_from(["plus", "minus", "zero_good"]), st.sampled_from(["plus", "minus", "zero_good", "zero_bad"]))
def test_stabilizations_commute_at_distinct_primes(l1, l2, m1, m2):
    F = eisenstein_E2_psi(TRIV, BOUND)

    def apply(G, ell, mode):
        if mode == "zero_bad":
            return stabilize(G, ell, mode)
        return stabilize(G, ell, mode, 1, ell, check=False)

    assert _same(apply(apply(F, l1, m1), l2, m2), apply(apply(F, l2, m2), l1, m1))


def test_stabilize_coefficient_formula():
    F = eisenstein_E2_psi(TRIV, 200)
    G = stabilize(F, 5, "zero_good", 1, 5)
    for n in range(1, 201):
        expect = F[n] - 6 * (F[n // 5] if n % 5 == 0 else 0) + 5 * (F[n // 25] if n % 25 == 0 else 0)
        assert G[n] == expect


def test_zero_bad_uses_own_coefficient():
    F = eisenstein_E2_psi(PSI_M4, 100)
    G = stabilize(F, 2, "zero_bad")
    assert all(G[n] == F[n] for n in range(1, 101))
    H = stabilize(eisenstein_E2_psi(TRIV, 100), 3, "zero_bad")
    assert H[3] == 4 - 4 * 1


def test_stabilize_errors():
    F = eisenstein_E2_psi(TRIV, 50)
    with pytest.raises(ValueError, match="mode"):
        stabilize(F, 5, "sideways", 1, 5)
    with pytest.raises(ValueError, match="alpha and beta"):
        stabilize(F, 5, "plus")
    with pytest.raises(ValueError, match="a_5"):
        stabilize(F, 5, "plus", -1, -5)
    with pytest.raises(ValueError, match="must equal"):
        stabilize(F, 5, "plus", 2, 4, check=False)


def test_plan_for_19a1():
    plan = stabilization_plan(E19, TRIV)
    assert plan.steps == ((19, "plus"),)


# ------------------------------------------------------------------ the congruence


def test_congruence_19a1():
    assert check_eisenstein_congruence(E19, TRIV, 500) == (True, None)


@pytest.mark.parametrize("d", [d for d in range(-30, 31) if d and is_fundamental_discriminant(d)])
def test_congruence_sextic_family(d):
    psi, _ = mod3_characters(d)
    assert check_eisenstein_congruence(sextic_curve(d), psi, 500) == (True, None)


def test_congruence_e8():
    assert check_eisenstein_congruence(sextic_curve(8), QuadraticCharacter(8), 200) == (True, None)


def test_congruence_fault_injection():
    a = an_list(E19, 300).copy()
    a[101] += 1
    assert check_eisenstein_congruence(E19, TRIV, 300, a=a) == (False, 101)
    assert check_eisenstein_congruence(E19, TRIV, 100, a=a) == (True, None)


def test_congruence_wrong_character_rejected():
    with pytest.raises(ValueError):
        check_eisenstein_congruence(BUILTIN_CURVES["37a1"], TRIV, 100)


# ------------------------------------------------------------------ CSV


def test_qexpansion_csv_roundtrip(tmp_path):
    F = stabilize(eisenstein_E2_psi(TRIV, 60), 19, "plus", 1, 19)
    path = tmp_path / "f.csv"
    F.to_csv(path)
    G = QExpansion.from_csv(path)
    assert _same(F, G)
    assert G.constant_term == Fraction(-1, 24) * (1 - 19)


def test_qexpansion_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,a_n\n0,-1/24\n1,1\n2,x\n")
    with pytest.raises(ValueError, match=r"bad.csv:4"):
        QExpansion.from_csv(bad)
    gap = tmp_path / "gap.csv"
    gap.write_text("n,a_n\n1,1\n3,4\n")
    with pytest.raises(ValueError, match="gaps"):
        QExpansion.from_csv(gap)
    hdr = tmp_path / "hdr.csv"
    hdr.write_text("k,v\n1,1\n")
    with pytest.raises(ValueError, match="header"):
        QExpansion.from_csv(hdr)


def test_qexpansion_reduce():
    F = eisenstein_E2_psi(TRIV, 12).reduce(3)
    assert F[6] == 0 and F[2] == 0 and F[4] == 1


# ------------------------------------------------------------------ 3-adic logarithm


def test_log_examples():
    assert iwasawa_log3(1, 10) == PadicApprox(0, 10, 10)
    assert iwasawa_log3(-1, 10).residue == 0
    L = iwasawa_log3(4, 6)
    assert (L.residue, L.valuation) == (534, 1)
    assert L.certified


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10**6).filter(lambda u: u % 3), st.integers(2, 25))
def test_log_matches_limit_oracle(u, k):
    assert iwasawa_log3(u, k).residue == log3_oracle(u, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10**5).filter(lambda u: u % 3), st.integers(1, 10**5).filter(lambda u: u % 3), st.integers(2, 20))
def test_log_additive(u, v, k):
    m = 3**k
    assert iwasawa_log3(u * v, k).residue == (iwasawa_log3(u, k).residue + iwasawa_log3(v, k).residue) % m


def test_log_rejects_nonunit():
    with pytest.raises(ValueError):
        iwasawa_log3(6, 5)


# ------------------------------------------------------------------ right-hand sides


def test_rhs_trivial_minus_23():
    rhs = congruence_rhs_trivial(-23)
    assert rhs.class_number == 3
    assert rhs.alpha == (4, 2)
    assert rhs.ord3 == 0
    assert rhs.log.certified
    wide = congruence_rhs_trivial(-23, k=40)
    assert wide.ord3 == rhs.ord3
    assert wide.log.residue % 3**20 == rhs.log.residue


def test_norm_generators():
    assert norm_equation_generator(-23, 3) == (4, 2)
    a, b = norm_equation_generator(-11, 1)
    assert a * a + 11 * b * b == 12 and (a, b) == (1, 1)


@pytest.mark.parametrize("K", [-11, -23, -47, -59, -71, -83, -107, -131])
def test_rhs_trivial_generator_norm(K):
    rhs = congruence_rhs_trivial(K)
    a, b = rhs.alpha
    assert a * a - K * b * b == 4 * 3**rhs.class_number
    assert rhs.ord3 == -1 + rhs.log.valuation


def test_rhs_trivial_errors():
    for K in (-4, -3, -7, 5, -12):
        with pytest.raises(ValueError):
            congruence_rhs_trivial(K)


def test_rhs_nontrivial_example():
    rhs = congruence_rhs_nontrivial(sextic_curve(-4), QuadraticCharacter(-4), -23)
    assert rhs.ord3 == 0
    assert rhs.three_integral
    assert rhs.bernoulli_values == (Fraction(-1, 2), Fraction(-8))


def test_rhs_nontrivial_euler_zero():
    # psi(3) = 1 kills the Euler factor at 3
    d = next(d for d in range(4, 200) if is_fundamental_discriminant(d) and QuadraticCharacter(d)(3) == 1)
    E = BUILTIN_CURVES["11a1"]
    rhs = congruence_rhs_nontrivial(E, QuadraticCharacter(d), -23)
    assert rhs.ord3 == math.inf


def test_rhs_nontrivial_errors():
    E = sextic_curve(-4)
    with pytest.raises(ValueError):
        congruence_rhs_nontrivial(E, TRIV, -23)
    with pytest.raises(ValueError):
        congruence_rhs_nontrivial(E, PSI_M4, -7)
    with pytest.raises(ValueError):
        congruence_rhs_nontrivial(E, PSI_M4, 5)


def _sextic_grid():
    for d in range(-150, 151):
        if d and is_fundamental_discriminant(d) and d % 3 != 1 and d % 9:
            for K in (-23, -47, -59, -71, -83, -107):
                yield d, K


def test_rhs_nontrivial_matches_class_number_certificate():
    checked = 0
    for d, K in _sextic_grid():
        psi, _ = mod3_characters(d)
        rhs = congruence_rhs_nontrivial(sextic_curve(d), psi, K)
        if rhs.euler_factor == 0 or not rhs.three_integral:
            continue
        p0 = psi0(psi, K)
        chars = (p0 * QuadraticCharacter(K), p0 * OMEGA)
        assert all(c.discriminant < 0 for c in chars)
        cert = all(class_group(c.discriminant).h3 == 1 for c in chars)
        assert valuation(rhs.euler_factor, 3) == 0
        assert (rhs.ord3 == 0) == cert, (d, K)
        checked += 1
    assert checked > 200


def test_rhs_nontrivial_h3_three_forces_positive_ord():
    for d, K in _sextic_grid():
        psi, _ = mod3_characters(d)
        rhs = congruence_rhs_nontrivial(sextic_curve(d), psi, K)
        if rhs.bernoulli_values is None or rhs.euler_factor == 0:
            continue
        p0 = psi0(psi, K)
        if any(class_group(c.discriminant).h3 > 1 for c in (p0 * QuadraticCharacter(K), p0 * OMEGA)):
            assert rhs.ord3 >= 1
