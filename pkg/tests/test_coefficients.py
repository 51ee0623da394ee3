"""Tests for the quadratic interaction coefficients."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msqg import ModelParams, alpha, alpha_pairs, coefficient_table
from msqg.coefficients import _alpha_formula


def scalar_alpha(k, h, delta):
    """Straightforward scalar evaluation of the regularized coefficient.

    Written independently of the vectorized production code: plain
    ``math`` calls, no shared helpers.
    """
    k1, k2 = k
    h1, h2 = h
    if (h1, h2) == (0, 0) or (h1, h2) == (k1, k2):
        return 0.0
    if h1 * k2 - h2 * k1 == 0:
        return 0.0
    cross = h1 * k2 - h2 * k1
    nk = math.sqrt(k1 * k1 + k2 * k2)
    nh = math.sqrt(h1 * h1 + h2 * h2)
    nkh = math.sqrt((k1 - h1) ** 2 + (k2 - h2) ** 2)
    return -0.5 * (cross / nk) * (nkh ** (-delta) * nh - nh ** (-delta) * nkh)


def scalar_alpha_euler(k, h):
    """Euler specialization via an algebraically different route.

    At delta = 1 the bracket collapses to (|h|^2 - |k-h|^2) / (|h| |k-h|)
    with an integer numerator, so this path shares no floating-point
    intermediate with the generic formula.
    """
    k1, k2 = k
    h1, h2 = h
    cross = h1 * k2 - h2 * k1
    if (h1, h2) in ((0, 0), (k1, k2)) or cross == 0:
        return 0.0
    num = 2 * (h1 * k1 + h2 * k2) - (k1 * k1 + k2 * k2)  # exact integer
    nk = math.sqrt(k1 * k1 + k2 * k2)
    nh = math.sqrt(h1 * h1 + h2 * h2)
    nkh = math.sqrt((k1 - h1) ** 2 + (k2 - h2) ** 2)
    return -0.5 * cross * num / (nk * nh * nkh)


mode_component = st.integers(min_value=-24, max_value=24)
mode = st.tuples(mode_component, mode_component)
nonzero_mode = mode.filter(lambda m: m != (0, 0))
deltas = st.sampled_from([0.1, 0.25, 0.5, 0.75, 1.0])


def test_frozen_value_euler():
    params = ModelParams(delta=1.0, cutoff_N=8)
    val = alpha((1, 0), (0, 1), params)
    assert val == pytest.approx(-0.35355339059327384, rel=1e-15)
    assert val == pytest.approx(-1.0 / (2.0 * math.sqrt(2.0)), rel=1e-15)


def test_matches_independent_scalar_evaluation():
    rng = np.random.default_rng(7)
    for delta in (0.25, 0.5, 1.0):
        params = ModelParams(delta=delta, cutoff_N=32)
        for _ in range(200):
            k = tuple(int(v) for v in rng.integers(-20, 21, size=2))
            h = tuple(int(v) for v in rng.integers(-20, 21, size=2))
            if k == (0, 0):
                continue
            # The bracket cancels almost completely when |h| is close to
            # |k - h|, so an independent evaluation order can differ by a
            # few amplified ulps.
            expected = scalar_alpha(k, h, delta)
            assert alpha(k, h, params) == pytest.approx(
                expected, rel=1e-10, abs=1e-13
            )


def test_matches_euler_specialization():
    params = ModelParams(delta=1.0, cutoff_N=32)
    rng = np.random.default_rng(11)
    for _ in range(300):
        k = tuple(int(v) for v in rng.integers(-20, 21, size=2))
        h = tuple(int(v) for v in rng.integers(-20, 21, size=2))
        if k == (0, 0):
            continue
        assert alpha(k, h, params) == pytest.approx(
            scalar_alpha_euler(k, h), rel=1e-13, abs=1e-300
        )


@given(k=nonzero_mode, h=mode, delta=deltas)
@settings(max_examples=300, deadline=None)
def test_pair_symmetry(k, h, delta):
    # Swapping h with k - h leaves the coefficient unchanged.
    params = ModelParams(delta=delta, cutoff_N=64)
    kh = (k[0] - h[0], k[1] - h[1])
    a = alpha(k, h, params)
    b = alpha(k, kh, params)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@given(k=nonzero_mode, h=mode, delta=deltas)
@settings(max_examples=200, deadline=None)
def test_parity(k, h, delta):
    # Negating both wavevectors leaves the coefficient unchanged.
    params = ModelParams(delta=delta, cutoff_N=64)
    a = alpha(k, h, params)
    b = alpha((-k[0], -k[1]), (-h[0], -h[1]), params)
    assert a == b


def test_excluded_pairs_are_exactly_zero():
    params = ModelParams(delta=0.5, cutoff_N=8)
    assert alpha((3, 2), (0, 0), params) == 0.0
    assert alpha((3, 2), (3, 2), params) == 0.0
    # Collinear h (zero cross product).
    assert alpha((2, 1), (4, 2), params) == 0.0
    assert alpha((2, 1), (-2, -1), params) == 0.0


def test_zero_output_mode_rejected():
    params = ModelParams(delta=0.5, cutoff_N=8)
    with pytest.raises(ValueError):
        alpha((0, 0), (1, 0), params)
    with pytest.raises(ValueError):
        alpha_pairs(np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 1]]), params)


def test_formula_returns_zero_on_zero_output_mode():
    # The raw vectorized formula (used by analytic identities) evaluates
    # to exactly zero on k = 0 rows instead of raising.
    params = ModelParams(delta=0.5, cutoff_N=8)
    K = np.array([[0, 0], [0, 0]])
    H = np.array([[1, 0], [2, -3]])
    out = _alpha_formula(K, H, params)
    assert out.shape == (2,)
    assert np.all(out == 0.0)


def test_pairs_agrees_with_scalar():
    params = ModelParams(delta=0.75, cutoff_N=16)
    rng = np.random.default_rng(3)
    K = rng.integers(-10, 11, size=(50, 2))
    K[np.all(K == 0, axis=1)] = [1, 1]
    H = rng.integers(-10, 11, size=(50, 2))
    vals = alpha_pairs(K, H, params)
    for i in range(50):
        assert vals[i] == alpha(tuple(K[i]), tuple(H[i]), params)


@given(k=nonzero_mode, h=mode, delta=st.sampled_from([0.25, 0.5, 1.0]))
@settings(max_examples=200, deadline=None)
def test_streamline_variants_differ_by_output_weight(k, h, delta):
    cons = ModelParams(
        delta=delta, cutoff_N=64, formulation="streamline", streamline_variant="consistent"
    )
    alt = ModelParams(
        delta=delta, cutoff_N=64, formulation="streamline", streamline_variant="alternate"
    )
    a_cons = alpha(k, h, cons)
    a_alt = alpha(k, h, alt)
    weight = float(k[0] * k[0] + k[1] * k[1]) ** (1.0 + delta)
    assert a_alt == pytest.approx(weight * a_cons, rel=1e-12, abs=1e-300)


@given(k=nonzero_mode, h=mode, delta=st.sampled_from([0.25, 0.5, 1.0]))
@settings(max_examples=200, deadline=None)
def test_streamline_pair_symmetry(k, h, delta):
    params = ModelParams(delta=delta, cutoff_N=64, formulation="streamline")
    kh = (k[0] - h[0], k[1] - h[1])
    assert alpha(k, h, params) == pytest.approx(
        alpha(k, kh, params), rel=1e-12, abs=1e-300
    )


def test_streamline_scalar_value():
    # Hand evaluation of the consistent variant at a single pair.
    delta = 0.5
    params = ModelParams(delta=delta, cutoff_N=8, formulation="streamline")
    k, h = (1, 0), (1, 1)
    cross = h[0] * k[1] - h[1] * k[0]  # -1
    nk = 1.0
    nh = math.sqrt(2.0)
    nkh = 1.0
    expected = 0.5 * nk ** (-(1 + delta)) * cross * (nkh ** (1 + delta) - nh ** (1 + delta))
    assert alpha(k, h, params) == pytest.approx(expected, rel=1e-14)


def test_coefficient_table_matches_scalar():
    params = ModelParams(delta=0.5, cutoff_N=3)
    modes, table = coefficient_table(3, params)
    m = len(modes)
    assert table.shape == (m, m)
    # All modes of the square box except the origin, each exactly once.
    assert len({tuple(mm) for mm in modes}) == m
    assert m == 7 * 7 - 1
    rng = np.random.default_rng(5)
    for _ in range(40):
        i, j = rng.integers(0, m, size=2)
        assert table[i, j] == alpha(tuple(modes[i]), tuple(modes[j]), params)
