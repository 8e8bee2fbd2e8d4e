import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perisolve.besov import (BesovParams, DyadicPartition, besov_blocks, besov_norm, build_partition,
                             lifting_ratio)
from perisolve.exceptions import PartitionTooShort, ZeroInput
from perisolve.periodic_fourier import TrigPolynomial, random_trig_polynomial
from oracles import hat

ROOT_TWO_PI = math.sqrt(2 * math.pi)


def test_partition_examples():
    part = build_partition(5)
    assert part.phi(0, 0.5) == 1.0
    assert part.phi(3, 8) == 1.0 and part.phi(2, 8) == 0.0 and part.phi(4, 8) == 0.0
    assert part.phi(1, 3) == pytest.approx(1 - (math.log2(3) - 1), abs=1e-15)
    assert part.phi(1, 3) == pytest.approx(0.415, abs=1e-3)
    assert part.phi(1, 3) + part.phi(2, 3) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("jmax", [0, 1, 4, 10])
def test_partition_matches_independent_hats(jmax):
    part = build_partition(jmax)
    ts = np.linspace(-2 ** (jmax + 1), 2 ** (jmax + 1), 997)
    for j in range(jmax + 1):
        np.testing.assert_allclose(part.phi(j, ts), [hat(j, t) for t in ts], atol=1e-15)


@pytest.mark.parametrize("jmax", [0, 3, 10])
def test_partition_support_and_range(jmax):
    part = build_partition(jmax)
    ts = np.linspace(-2 ** (jmax + 2), 2 ** (jmax + 2), 10 ** 4)
    values = part(ts)
    assert values.min() >= 0 and values.max() <= 1
    assert np.all(values[0][np.abs(ts) > 2] == 0)
    for j in range(1, jmax + 1):
        outside = (np.abs(ts) < 2 ** (j - 1)) | (np.abs(ts) > 2 ** (j + 1))
        assert np.all(values[j][outside] == 0)


@pytest.mark.parametrize("jmax", [0, 2, 7, 12])
def test_partition_of_unity(jmax):
    part = build_partition(jmax)
    ts = np.linspace(-2 ** jmax, 2 ** jmax, 10 ** 4)
    assert np.max(np.abs(part(ts).sum(axis=0) - 1)) <= 1e-12


def test_besov_examples():
    const = TrigPolynomial(1, {0: [1.0]})
    for s in (0.0, 0.5, 3.0):
        assert besov_norm(const, BesovParams(s), build_partition(2)) == pytest.approx(ROOT_TWO_PI, rel=1e-14)
    e8 = TrigPolynomial(1, {8: [1.0]})
    assert besov_norm(e8, BesovParams(1), build_partition(3)) == pytest.approx(8 * ROOT_TWO_PI, rel=1e-14)
    assert besov_norm(TrigPolynomial(1, {}), BesovParams(1), build_partition(2)) == 0.0


def test_besov_two_block_monomial_by_hand():
    # e_3: blocks j = 1, 2 with weights phi_j(3); each block norm is phi_j(3) * sqrt(2 pi)
    s, p = 0.7, BesovParams(0.7, 2, 2)
    w1, w2 = hat(1, 3), hat(2, 3)
    expected = ROOT_TWO_PI * math.sqrt((2 ** s * w1) ** 2 + (2 ** (2 * s) * w2) ** 2)
    assert besov_norm(TrigPolynomial(1, {3: [1.0]}), p, build_partition(3)) == pytest.approx(expected, rel=1e-14)


def test_besov_blocks_table():
    rows = besov_blocks(TrigPolynomial(1, {8: [1.0]}), BesovParams(1), build_partition(4))
    assert [j for j, _, _ in rows] == [0, 1, 2, 3, 4]
    assert rows[3][2] == pytest.approx(8 * ROOT_TWO_PI)


def test_partition_too_short():
    with pytest.raises(PartitionTooShort):
        besov_norm(TrigPolynomial(1, {9: [1.0]}), BesovParams(1), build_partition(3))


def test_lifting_examples():
    assert lifting_ratio(TrigPolynomial(1, {8: [1.0]}), BesovParams(1), build_partition(4)) == pytest.approx(1.0, abs=1e-14)
    s = 1.0
    num = 3 * math.sqrt(sum(2 ** (2 * s * j) * hat(j, 3) ** 2 for j in range(4)))
    den = math.sqrt(sum(2 ** (2 * (s + 1) * j) * hat(j, 3) ** 2 for j in range(4)))
    r3 = lifting_ratio(TrigPolynomial(1, {3: [1.0]}), BesovParams(s), build_partition(3))
    assert r3 == pytest.approx(num / den, rel=1e-14)
    assert 0.5 <= r3 <= 2
    assert 0.5 <= lifting_ratio(TrigPolynomial(1, {1: [1.0]}), BesovParams(s)) <= 2


def test_lifting_zero():
    with pytest.raises(ZeroInput):
        lifting_ratio(TrigPolynomial(1, {}), BesovParams(1))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 300), st.sampled_from([-1, 1]), st.floats(0, 3), st.sampled_from([1.0, 1.5, 2.0, 3.0]),
       st.sampled_from([1.0, 2.0, 4.0]))
def test_monomial_lifting_bracket(k, sign, s, p, q):
    f = TrigPolynomial(2, {sign * k: [0.3, 1j]})
    assert 0.5 <= lifting_ratio(f, BesovParams(s, p, q), M=4 * k + 8) <= 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 16), st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3))
def test_homogeneity_and_triangle(seed, lam):
    rng = np.random.default_rng(seed)
    f, g = random_trig_polynomial(rng, 2, 12), random_trig_polynomial(rng, 2, 12)
    part, params = build_partition(4), BesovParams(0.5, 2, 2)
    nf = besov_norm(f, params, part)
    assert besov_norm(lam * f, params, part) == pytest.approx(abs(lam) * nf, rel=1e-12)
    assert besov_norm(f + g, params, part) <= nf + besov_norm(g, params, part) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 16), st.floats(-2, 3), st.floats(0, 2))
def test_monotone_in_s_for_high_frequencies(seed, s, ds):
    rng = np.random.default_rng(seed)
    f = random_trig_polynomial(rng, 1, 16)
    f = TrigPolynomial(1, {k: v for k, v in f.coeffs.items() if abs(k) >= 2})
    part = build_partition(4)
    assert besov_norm(f, BesovParams(s), part) <= besov_norm(f, BesovParams(s + ds), part) * (1 + 1e-12)
