import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldfeld.arith import is_fundamental_discriminant, kronecker, primes_up_to
from goldfeld.characters import QuadraticCharacter
from goldfeld.classgroups import class_group
from goldfeld.curves import BUILTIN_CURVES, conductor, sextic_curve
from goldfeld.rootnumbers import quadratic_twist_root_number, sextic_root_number
from goldfeld.scanner import (
    DEFAULT_PAIRS,
    MANIN_FLAG,
    Condition,
    CriterionError,
    CriterionReport,
    DensityReport,
    HeegnerConstraints,
    SearchCapExhausted,
    ValidPair,
    cubic_hypotheses,
    cubic_prime_set,
    cubic_products,
    cubic_scan,
    cubic_twists,
    density_report,
    evaluate_quadratic_twists,
    find_heegner_field,
    heegner_field_proportion_bound,
    heegner_hypothesis,
    nakagawa_horie_density,
    proportion_lower_bound,
    quadratic_density,
    rank_prediction_sextic,
    scan_quadratic_twists,
    scan_sextic,
    sextic_criterion,
    sextic_density,
    taya_reports,
    theorem_main_criterion,
    valid_pair,
)
from tests.oracles import is_prime_naive, kronecker_naive

E19 = BUILTIN_CURVES["19a1"]
TRIV = QuadraticCharacter(1)
STRICT = HeegnerConstraints(three_split=True, odd=True, below_minus4=True)

QUAD_POS = [8, 12, 21, 41, 53, 56, 65, 84, 89, 129, 164, 165, 185, 189]
QUAD_NEG = [-4, -7, -24, -28, -43, -55, -63, -115, -123, -159, -163, -168, -172, -175, -187, -195]
CUBIC_PRIMES = [31, 127, 139, 151, 163, 211, 223, 271, 307, 331, 439, 463, 487, 499]


# ------------------------------------------------------------------ predicates


def test_heegner_examples():
    assert heegner_hypothesis(-23, 144)
    assert not heegner_hypothesis(-7, 19)
    assert heegner_hypothesis(-23, 1)
    with pytest.raises(ValueError):
        heegner_hypothesis(5, 19)


@settings(max_examples=200)
@given(st.sampled_from([d for d in range(-400, -2) if is_fundamental_discriminant(d)]), st.integers(1, 2000))
def test_heegner_matches_kronecker_oracle(K, N):
    primes = [p for p in range(2, N + 1) if N % p == 0 and is_prime_naive(p)]
    expect = all((K % 8 == 1) if p == 2 else kronecker_naive(K, p) == 1 for p in primes)
    assert heegner_hypothesis(K, N) == expect


def test_valid_pair_examples():
    assert valid_pair(2, 3)
    assert valid_pair(3, 9)
    assert not valid_pair(3, 3)
    assert valid_pair(1, 4) and valid_pair(5, 8) and valid_pair(8, 16) and valid_pair(12, 16)
    assert not valid_pair(3, 4) and not valid_pair(4, 16) and not valid_pair(2, 4)
    ValidPair(3, 9)
    with pytest.raises(ValueError):
        ValidPair(3, 3)


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(1, 200))
def test_valid_pair_definition(m, M):
    g = math.gcd(m, M)
    odd_ok = all(M % (p * p) == 0 and m % (p * p) != 0 for p in range(3, g + 1, 2) if g % p == 0 and is_prime_naive(p))
    even_ok = M % 2 == 1 or (M % 4 == 0 and m % 4 == 1) or (M % 16 == 0 and m % 16 in (8, 12))
    assert valid_pair(m, M) == (odd_ok and even_ok)


# ------------------------------------------------------------------ the main criterion


def test_main_criterion_sextic_minus4():
    rep = theorem_main_criterion(sextic_curve(-4), QuadraticCharacter(-4), -23)
    assert rep.prediction == "rank1_over_K"
    assert rep.passed and not rep.failed
    assert rep.heegner_field == -23
    assert MANIN_FLAG in rep.assumed_flags
    assert rep.class_number_evidence == {-4: 1, -276: 1}
    assert rep.condition("psi0_conductor").evidence["automatic"] is True


@pytest.mark.parametrize("d", [-8, 13, -20, 28])
def test_main_criterion_psi_at_3_fails(d):
    assert kronecker(d, 3) == 1
    E = sextic_curve(d)
    K = find_heegner_field(conductor(E), STRICT)
    rep = theorem_main_criterion(E, QuadraticCharacter.of_field(d), K)
    assert not rep.condition("psi_at_3").holds
    assert rep.prediction == "inconclusive"


def test_main_criterion_wrong_character():
    with pytest.raises(CriterionError, match="isogeny"):
        theorem_main_criterion(BUILTIN_CURVES["11a1"], QuadraticCharacter(5), -23)


def test_main_criterion_19a1_case2_inconclusive():
    rep = theorem_main_criterion(E19, TRIV, -23, subject="19a1")
    assert rep.prediction == "inconclusive"
    assert not rep.condition("three_divides_N").holds
    assert "three_divides_N" in rep.failed


def test_main_criterion_field_errors():
    E, psi = sextic_curve(-4), QuadraticCharacter(-4)
    for K in (-4, -3, -20, 5, -24):
        with pytest.raises(CriterionError) as exc:
            theorem_main_criterion(E, psi, K)
        assert exc.value.hypothesis


def test_main_criterion_isogeny_error():
    with pytest.raises(CriterionError, match="isogeny"):
        theorem_main_criterion(BUILTIN_CURVES["37a1"], TRIV, -23)


def test_criterion_report_rejects_unsupported_prediction():
    with pytest.raises(ValueError):
        CriterionReport("x", (Condition("a", False),), "rank1_over_K")
    with pytest.raises(ValueError):
        CriterionReport("x", (Condition("a", True),), "rank7")


# ------------------------------------------------------------------ Heegner field search


def test_find_heegner_field():
    assert find_heegner_field(144, STRICT) == -23
    assert find_heegner_field(27, STRICT) == -11
    assert find_heegner_field(1, STRICT) == -11
    assert find_heegner_field(1, HeegnerConstraints(odd=True, below_minus4=True)) == -7
    K = find_heegner_field(19)
    assert heegner_hypothesis(K, 19)
    assert all(not heegner_hypothesis(k, 19) for k in range(-3, K, -1) if is_fundamental_discriminant(k))


def test_find_heegner_field_cap():
    with pytest.raises(SearchCapExhausted) as exc:
        find_heegner_field(19 * 23 * 29, STRICT, cap=30)
    assert exc.value.cap == 30
    assert isinstance(exc.value, LookupError)


def test_find_heegner_field_class_number_constraint():
    K = find_heegner_field(15, HeegnerConstraints(True, True, True, h3_trivial_times=(-15,)))
    assert heegner_hypothesis(K, 15)
    assert class_group(-15 * K).h3 == 1
    loose = find_heegner_field(15, STRICT)
    assert abs(loose) <= abs(K)


# ------------------------------------------------------------------ sextic family


def test_sextic_criterion_examples():
    rep = sextic_criterion(-4, -23)
    assert rep.prediction == "rank1_over_K"
    assert rep.predicted_rank == 0
    assert rep.root_number == 1
    rep5 = sextic_criterion(5, -23)
    assert rep5.prediction == "inconclusive"
    assert not rep5.condition("heegner").holds
    rep8 = sextic_criterion(8)
    assert rep8.passed and rep8.heegner_field == find_heegner_field(24, HeegnerConstraints(True, True, True, (8 * rep8.heegner_field,)))


def test_sextic_criterion_failure_skips_search():
    rep = sextic_criterion(29)
    assert not rep.condition("class_number_d").holds
    assert rep.heegner_field is None
    assert rep.condition("heegner").evidence == {"searched": False}


def test_sextic_rank_prediction_examples():
    assert rank_prediction_sextic(-4) == (0, 1)
    assert rank_prediction_sextic(21) == (1, 0)
    with pytest.raises(CriterionError):
        rank_prediction_sextic(29)


def test_sextic_branch_for_29():
    # 29 = 2 mod 9 sits in the first branch even though the criterion does not pass
    from goldfeld.scanner import _sextic_branch

    assert _sextic_branch(29) == (0, 1)


@pytest.fixture(scope="module")
def sextic_records():
    return scan_sextic(3000)


def test_sextic_parity_coherence(sextic_records):
    passed = [r for r in sextic_records if r.prediction != "inconclusive"]
    assert len(passed) > 300
    for r in passed:
        assert r.rank % 2 == (1 - sextic_root_number(r.d).w_global) // 2
        assert r.root_number == sextic_root_number(r.d).w_global


def test_sextic_scan_order_and_domain(sextic_records):
    ds = [r.d for r in sextic_records]
    assert ds == sorted(ds, key=lambda d: (abs(d), d))
    assert all(is_fundamental_discriminant(d) for d in ds)
    assert len(ds) == len(set(ds))
    for r in sextic_records:
        if r.d % 3 == 1 or r.d % 9 == 0:
            assert not r.conditions["d_mod_9"] and r.prediction == "inconclusive"


def test_sextic_scan_determinism(sextic_records):
    for r in sextic_records[::37]:
        again = sextic_criterion(r.d)
        assert again.passed == (r.prediction != "inconclusive")
        if again.passed:
            assert r.prediction == f"rank{again.predicted_rank}_over_Q"
        assert {c.id: c.holds for c in again.conditions} == r.conditions


def test_sextic_scan_parallel_matches_serial(sextic_records):
    par = scan_sextic(3000, workers=2)
    assert [r.to_json() for r in par] == [r.to_json() for r in sextic_records]


def test_twist_record_json(sextic_records):
    obj = json.loads(json.dumps(sextic_records[0].to_json()))
    assert set(obj) == {"d", "family", "conditions", "prediction", "heegner_field", "evidence"}
    assert all(isinstance(v, bool) for v in obj["conditions"].values())
    assert all(isinstance(k, str) and isinstance(v, int) for k, v in obj["evidence"].items())


# ------------------------------------------------------------------ quadratic twists


def test_quadratic_printed_lists():
    out = scan_quadratic_twists(E19, 200, domain="printed")
    assert [d for d, _ in out if d > 0] == QUAD_POS
    assert [d for d, _ in out if d < 0] == QUAD_NEG
    assert all(r == 1 for d, r in out if d > 0)
    assert all(r == 0 for d, r in out if d < 0)


def test_quadratic_fundamental_is_restriction():
    out = scan_quadratic_twists(E19, 200)
    expect = [d for d in sorted(QUAD_POS + QUAD_NEG, key=lambda d: (abs(d), d)) if is_fundamental_discriminant(d)]
    assert [d for d, _ in out] == expect


def test_quadratic_small_bound_empty():
    assert scan_quadratic_twists(E19, 4) == []


def test_quadratic_rank_parity():
    for r in evaluate_quadratic_twists(E19, 3000):
        if r.prediction != "inconclusive":
            assert r.rank == (1 - quadratic_twist_root_number(E19, r.d)) // 2


def test_quadratic_rejects_non_semistable():
    with pytest.raises(ValueError, match="semistable"):
        evaluate_quadratic_twists(BUILTIN_CURVES["27a1"], 100)
    with pytest.raises(ValueError):
        evaluate_quadratic_twists(E19, 100, domain="everything")


# ------------------------------------------------------------------ cubic twists


def test_cubic_prime_set_example():
    assert cubic_prime_set(108, -23, 500) == CUBIC_PRIMES
    assert cubic_prime_set(108, -23, 2) == []


def test_cubic_prime_set_density():
    S = cubic_prime_set(108, -23, 10**6)
    base = [p for p in primes_up_to(10**6) if p > 3]
    assert abs(len(S) / len(base) - Fraction(1, 8)) <= 0.02


def test_cubic_hypotheses_hold():
    assert all(c.holds for c in cubic_hypotheses(108, -23))


def test_cubic_products_oracle():
    primes = CUBIC_PRIMES[:6]
    X = 10**6
    brute = {1}
    for mask in range(1, 1 << len(primes)):
        n = math.prod(p for i, p in enumerate(primes) if mask >> i & 1)
        if n < X:
            brute.add(n)
    assert sorted(cubic_products(primes, X)) == sorted(brute)


def test_cubic_twists_classes():
    twists = cubic_twists(108, -23, 10**4)
    assert all(t.D % 3 == 1 for t in twists)
    for t in twists:
        assert t.rank == (0 if t.D % 9 in (1, 4) else 1)
        assert t.root_number == (1 if t.D % 9 in (1, 4) else -1)


def test_cubic_counts_nondecreasing():
    counts = [cubic_scan(108, -23, X).total for X in (10**3, 10**4, 3 * 10**4, 10**5)]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_cubic_hypothesis_failure_raises():
    with pytest.raises(CriterionError):
        cubic_twists(108, -7, 1000)


# ------------------------------------------------------------------ bounds and densities


def test_proportion_bounds():
    assert proportion_lower_bound(E19) == {(1, 1): Fraction(19, 120), (-1, 0): Fraction(19, 120)}
    assert abs(nakagawa_horie_density(1) - 3 / math.pi**2) < 1e-12
    assert heegner_field_proportion_bound(E19, 5) > 0


def test_density_report_invariants():
    ok = DensityReport.build("x", 10, 1, 10, {"rank1": 2}, "rank1", Fraction(1, 5), 0.05)
    assert ok.passed and ok.empirical == 0.2
    assert not DensityReport.build("x", 10, 1, 10, {"rank1": 1}, "rank1", Fraction(1, 5), 0.05).passed
    with pytest.raises(ValueError):
        DensityReport("x", 10, 1, 10, {"rank1": 2}, {"rank1": 0.2}, "rank1", Fraction(1, 5), 0.05, passed=False)
    with pytest.raises(ValueError):
        DensityReport("x", 10, 1, 10, {"rank1": 20}, {"rank1": 2.0}, "rank1", Fraction(1, 5), 0.05, passed=True)


def test_taya_reports_honor_valid_pair_gate():
    reports = taya_reports(2000)
    families = {r.family for r in reports}
    assert "taya(3,3)" not in families and "taya(2,4)" not in families
    valid = [p for p in DEFAULT_PAIRS if valid_pair(*p)]
    assert len(reports) == 2 * len(valid)


def test_small_density_reports():
    q = quadratic_density(E19, 2000)
    assert [r.sign for r in q] == [1, -1]
    assert all(0 <= v <= 1 for r in q for v in r.proportions.values())
    s = sextic_density(500)
    assert all(r.statistic == "assigned" for r in s)
    assert density_report("cubic", 10**4)[0].fit_constant > 0
    with pytest.raises(ValueError):
        density_report("quartic", 100)
