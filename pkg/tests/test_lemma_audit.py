import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perisolve.char_symbol import ProblemSpec, build_family
from perisolve.delay_operator import DelaySpec
from perisolve.exceptions import InvalidExponent, MissingFrequency, RangeTooSmall
from perisolve.lemma_audit import (OperatorSequence, fourier_type_ratio, ladder, m_bound_report,
                                   multiplier_apply, step1_audit, step2_audit, step3_audit)
from perisolve.periodic_fourier import TrigPolynomial, derivative, random_trig_polynomial, synthesize
from perisolve.spectral_solver import solve
from oracles import exact_seq_b, exact_seq_c, quad_lp_norm


def test_ladder_shape():
    ks = ladder(1000)
    assert all(k in ks for k in range(-64, 65))
    assert 512 in ks and -512 in ks and 1000 in ks and -1000 in ks
    assert 100 not in ks
    assert ladder(10) == list(range(-10, 11))
    assert 0 not in ladder(10, start=1)


def test_identity_sequence():
    rep = m_bound_report(OperatorSequence.constant("I", np.eye(3)), 100)
    assert rep.sup_norm == pytest.approx(1.0)
    assert rep.sup_diff == 0.0
    assert rep.passed


def test_linear_growth_flagged():
    rep = m_bound_report(OperatorSequence("kI", lambda k: k * np.eye(2)), 1000)
    assert rep.sup_norm == pytest.approx(1000)
    assert rep.sup_diff == pytest.approx(1000)
    assert rep.stability == pytest.approx(1.0, rel=1e-2)
    assert not rep.passed


def test_first_order_resolvent_sequence():
    K = 10 ** 4
    seq = OperatorSequence("N", lambda k: np.array([[1 / (1 + 1j * k)]]))
    rep = m_bound_report(seq, K)
    # direct scalar evaluation over every k in range
    ks = np.arange(-K, K + 1)
    direct = np.abs(ks / ((1 + 1j * ks) * (1 + 1j * (ks + 1))))
    assert rep.sup_norm == pytest.approx(1.0, abs=1e-15)
    assert rep.sup_diff == pytest.approx(direct.max(), rel=1e-14)
    assert rep.sup_diff <= 1
    assert rep.stability < 1e-3 and rep.passed


def test_range_too_small():
    with pytest.raises(RangeTooSmall):
        m_bound_report(OperatorSequence.constant("I", np.eye(1)), 3)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 100), st.integers(0, 2 ** 16))
def test_m_bound_scale_covariant(lam, seed):
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((2, 2))
    seq = OperatorSequence("M", lambda k: base / (1 + 1j * k + 0.3 * k ** 2))
    a = m_bound_report(seq, 64)
    b = m_bound_report(seq.scaled(lam), 64)
    assert b.sup_norm == pytest.approx(lam * a.sup_norm, rel=1e-12)
    assert b.sup_diff == pytest.approx(lam * a.sup_diff, rel=1e-12)


# -- step audits ----------------------------------------------------------------

def test_step1_first_order():
    rep = step1_audit(1, 4096)
    assert all(r.value == pytest.approx(2.0, rel=1e-15) for r in rep.rows)
    assert rep.sup_norm == 2.0 and rep.stability == 0.0


def test_step1_second_order_contains_k1():
    rep = step1_audit(2, 64)
    row = next(r for r in rep.rows if r.k == 1)
    assert row.value == pytest.approx(6 * math.sqrt(2), rel=1e-14)
    assert rep.sup_norm >= row.value


def test_step1_third_order_stable():
    a = step1_audit(3, 2 ** 10)
    b = step1_audit(3, 2 ** 20)
    assert abs(a.sup_norm - b.sup_norm) < 1e-6


def test_step2_first_order_discrepancy():
    rep = step2_audit(1, 8)
    row = next(r for r in rep.rows if r.k == 1)
    assert row.extra["lhs"] == [0.0, 0.0]
    assert complex(*row.extra["rhs"]) == pytest.approx(-2.0)
    assert row.discrepancy == pytest.approx(2 / 3)
    assert not rep.passed and rep.details["identity_holds"] is False


def test_step2_second_order_values():
    rep = step2_audit(2, 8)
    row = next(r for r in rep.rows if r.k == 1)
    assert complex(*row.extra["lhs"]) == pytest.approx(-2j, abs=1e-14)
    assert complex(*row.extra["rhs"]) == pytest.approx(6 - 6j, abs=1e-13)  # i^4 = 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_step2_matches_brute_force(n):
    rep = step2_audit(n, 40)
    for row in rep.rows:
        lhs_ref = exact_seq_c(n, row.k)
        rhs_ref = (1j * row.k) ** (2 * n) * exact_seq_b(n, row.k)
        assert abs(complex(*row.extra["lhs"]) - lhs_ref) <= 1e-10 * max(1, abs(lhs_ref))
        assert abs(complex(*row.extra["rhs"]) - rhs_ref) <= 1e-10 * max(1, abs(rhs_ref))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_step2_lhs_reflection_symmetry(n):
    # k -> -1-k swaps ik and i(k+1) up to conjugation, so c_{-1-k} = -conj(c_k)
    rows = {r.k: r for r in step2_audit(n, 16).rows}
    for k in range(1, 16):
        a, b = complex(*rows[k].extra["lhs"]), complex(*rows[-1 - k].extra["lhs"])
        assert b == pytest.approx(-a.conjugate(), abs=1e-9 * (1 + abs(a)))


def test_step2_sides_not_conjugate_under_k_flip():
    # neither side is conjugate-symmetric under k -> -k: the i^p factors do not flip
    rhs = {r.k: complex(*r.extra["rhs"]) for r in step2_audit(1, 8).rows}
    assert rhs[3] == pytest.approx(-6.0) and rhs[-3] == pytest.approx(6.0)
    lhs = {r.k: complex(*r.extra["lhs"]) for r in step2_audit(2, 8).rows}
    assert lhs[1] == pytest.approx(-2j) and lhs[-1] == pytest.approx(0.0)


def test_step3_first_order():
    rep = step3_audit(ProblemSpec(1, [[-1.0]]), 10 ** 4)
    assert rep.passed
    for child in rep.children:
        assert math.isfinite(child.sup_norm) and math.isfinite(child.sup_diff)
        assert child.stability < 1e-3
    T = next(c for c in rep.children if c.label == "T_k")
    assert T.sup_norm == 0.0 and T.sup_diff == 0.0


def test_step3_delay_problem(delayed):
    rep = step3_audit(delayed, 10 ** 3)
    assert all(math.isfinite(c.sup_norm) for c in rep.children)
    assert rep.details["resolvent_identity_defect"] <= 1e-10


# -- Fourier type and multipliers ---------------------------------------------------

@pytest.mark.parametrize("r", [1.2, 1.5, 2.0])
def test_fourier_type_single_mode(r):
    f = TrigPolynomial.monomial(5, [0.3, -1j])
    assert fourier_type_ratio(f, r, 64) == pytest.approx(1.0, abs=1e-12)


def test_fourier_type_parseval_cosine():
    assert fourier_type_ratio(TrigPolynomial(1, {1: [0.5], -1: [0.5]}), 2.0, 16) == pytest.approx(1.0, abs=1e-14)


def test_fourier_type_three_halves_against_quadrature():
    f = TrigPolynomial(1, {0: [1.0], 1: [1.0]})
    ratio = fourier_type_ratio(f, 1.5, 2 ** 16)
    # independent: |f(t)| = 2|cos(t/2)|
    lr = quad_lp_norm(lambda t: 2 * abs(math.cos(t / 2)), 1.5) / (2 * math.pi) ** (1 / 1.5)
    expected = 2 ** (1 / 3) / lr
    assert ratio == pytest.approx(expected, rel=1e-6)
    assert ratio <= 1.0


def test_fourier_type_bad_exponent():
    f = TrigPolynomial(1, {0: [1.0]})
    for r in (1.0, 2.5):
        with pytest.raises(InvalidExponent):
            fourier_type_ratio(f, r, 16)


def test_multiplier_identity():
    f = random_trig_polynomial(np.random.default_rng(0), 2, 3)
    u = multiplier_apply(OperatorSequence.constant("I", np.eye(2)), f)
    for k in f.frequencies:
        np.testing.assert_array_equal(u.coefficient(k), f.coefficient(k))


def test_multiplier_derivative():
    seq = OperatorSequence("ik", lambda k: 1j * k * np.eye(1), lambda k: k != 0)
    f = TrigPolynomial(1, {1: [1.0]})
    np.testing.assert_allclose(multiplier_apply(seq, f).coefficient(1), derivative(f, 1).coefficient(1))
    with pytest.raises(MissingFrequency):
        multiplier_apply(seq, TrigPolynomial(1, {0: [1.0]}))


def test_multiplier_resolvent_matches_solver(damped, cosine):
    fam = build_family(damped, 3)
    seq = OperatorSequence.from_mapping("N", {rec.k: rec.N for rec in fam})
    u = multiplier_apply(seq, cosine)
    assert u.coefficient(1)[0] == pytest.approx((1 - 1j) / 4, abs=1e-15)
    assert u.coefficient(-1)[0] == pytest.approx((1 + 1j) / 4, abs=1e-15)
    sol = solve(damped, cosine, 3)
    for k in (1, -1):
        assert np.array_equal(u.coefficient(k), sol.u.coefficient(k))


def test_multiplier_linear_and_composes():
    rng = np.random.default_rng(3)
    mats1 = {k: rng.standard_normal((2, 2)) for k in range(-4, 5)}
    mats2 = {k: rng.standard_normal((2, 2)) + 1j for k in range(-4, 5)}
    s1 = OperatorSequence.from_mapping("A", mats1)
    s2 = OperatorSequence.from_mapping("B", mats2)
    f, g = random_trig_polynomial(rng, 2, 4), random_trig_polynomial(rng, 2, 4)
    lin = multiplier_apply(s1, 2.5 * f + g)
    sep = 2.5 * multiplier_apply(s1, f) + multiplier_apply(s1, g)
    two_step = multiplier_apply(s2, multiplier_apply(s1, f))
    fused = multiplier_apply(s1.then(s2), f)
    for k in range(-4, 5):
        np.testing.assert_allclose(lin.coefficient(k), sep.coefficient(k), atol=1e-13)
        np.testing.assert_allclose(two_step.coefficient(k), fused.coefficient(k), atol=1e-13)


def test_report_json_fields():
    out = step2_audit(2, 8).to_json()
    assert {"label", "sup_norm", "sup_diff", "stability", "rows", "pass"} <= set(out)
    assert {"k", "value", "discrepancy"} <= set(out["rows"][0])
