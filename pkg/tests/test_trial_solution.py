import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.polynomial.hermite import hermval

from mhdfs.trial_solution import ProblemParams, TrialSolution, solution_from_dict, solution_to_dict

coefficients = arrays(float, st.integers(1, 25), elements=st.floats(-3, 3))


def direct_value(solution, tau):
    """Order-0 value assembled from numpy's Hermite polynomials."""
    s = tau / solution.l
    t = math.log(s) / solution.k
    total = 0.0
    for n, a in enumerate(solution.coeffs):
        c = np.zeros(n + 1)
        c[n] = 1.0
        total += a * math.exp(-t * t / 2) * hermval(t, c) / math.sqrt(2.0**n * math.factorial(n))
    return solution.l * (s * s / (s + solution.lam) + s * s / (s + 1) * total)


def random_solution(rng, N=12, lam=None, k=None, l=None):
    return TrialSolution(
        rng.normal(size=N + 1) / (1 + np.arange(N + 1)),
        lam if lam is not None else rng.uniform(0.05, 2.0),
        k if k is not None else rng.uniform(0.8, 3.0),
        l if l is not None else rng.uniform(0.6, 1.7),
    )


# -- ProblemParams -------------------------------------------------------------


def test_beta_from_m():
    assert ProblemParams(2.0, 5).beta == pytest.approx(4 / 3)
    assert ProblemParams(-0.6, 5).beta == pytest.approx(-3.0)
    assert ProblemParams(0.0, 0).beta == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        ProblemParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        ProblemParams(0.5, -1.0)


# -- evaluation ----------------------------------------------------------------


def test_zero_coefficients_value():
    sol = TrialSolution.zero(10, lam=1.0, k=2.0, l=1.0)
    assert sol.evaluate(1.0) == pytest.approx(0.5, abs=1e-15)


def test_zero_coefficients_far_slope():
    sol = TrialSolution.zero(10, lam=1.0, k=2.0, l=1.0)
    assert sol.evaluate(1e8, 1) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("lam, l", [(1.0, 1.0), (0.3, 1.0), (0.3, 1.7), (2.5, 0.6)])
def test_wall_curvature_zero_coefficients(lam, l):
    sol = TrialSolution.zero(6, lam=lam, l=l)
    assert sol.evaluate(0.0, 2) == pytest.approx(2 / (lam * l), rel=1e-14)


def test_matches_direct_assembly():
    rng = np.random.default_rng(7)
    for _ in range(5):
        sol = random_solution(rng)
        for tau in (0.01, 0.3, 1.0, 4.0, 60.0):
            assert sol.evaluate(tau) == pytest.approx(direct_value(sol, tau), rel=1e-12, abs=1e-14)


def test_rejects_negative_tau_and_bad_order():
    sol = TrialSolution.zero(4, 1.0)
    with pytest.raises(ValueError):
        sol.evaluate(-0.1)
    with pytest.raises(ValueError):
        sol.evaluate(1.0, 4)


def test_rejects_invalid_state():
    with pytest.raises(ValueError):
        TrialSolution(np.zeros(5), 0.0)
    with pytest.raises(ValueError):
        TrialSolution(np.zeros(5), -1.0)
    with pytest.raises(ValueError):
        TrialSolution([1.0, np.nan], 1.0)
    with pytest.raises(ValueError):
        TrialSolution(np.zeros(5), 1.0, k=0.0)


def test_basis_contribution_zero_at_wall():
    rng = np.random.default_rng(3)
    sol = random_solution(rng, N=20)
    plain = TrialSolution.zero(20, sol.lam, sol.k, sol.l)
    assert np.array_equal(sol.derivatives(0.0), plain.derivatives(0.0))


@settings(max_examples=60, deadline=None)
@given(coefficients, st.floats(0.01, 10), st.floats(0.5, 3.0), st.floats(0.5, 2.0))
def test_boundary_conditions_hold_for_any_coefficients(coeffs, lam, k, l):
    sol = TrialSolution(coeffs, lam, k, l)
    assert sol.evaluate(0.0, 0) == 0.0
    assert sol.evaluate(0.0, 1) == 0.0
    s = 1e-8
    # F = O(s^2) and F' = O(s), using |H~_n| <= 1 and |H~'_n| <= sqrt(2n + 2)
    total = np.sum(np.abs(coeffs))
    slope = 2 + math.sqrt(2 * len(coeffs)) / k
    assert abs(sol.evaluate(s * l, 0)) <= 1.01 * l * s * s * (1 / lam + total)
    assert abs(sol.evaluate(s * l, 1)) <= 1.01 * s * (2 / lam + slope * total)


@settings(max_examples=60, deadline=None)
@given(coefficients, st.floats(0.01, 10), st.floats(0.5, 3.0), st.floats(0.5, 2.0))
def test_slope_tends_to_one(coeffs, lam, k, l):
    sol = TrialSolution(coeffs, lam, k, l)
    # t = ln(s)/k = 20 sits far past the oscillatory zone for N <= 24
    assert sol.evaluate(math.exp(20 * k) * l, 1) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 5.0])
def test_derivatives_match_finite_differences(tau):
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(10):
        sol = random_solution(rng)
        F = sol.derivatives(np.array([tau - h, tau, tau + h]))
        for p in (1, 2, 3):
            fd = (F[p - 1, 2] - F[p - 1, 0]) / (2 * h)
            assert fd == pytest.approx(F[p, 1], rel=1e-5, abs=1e-5)


def test_scaling_covariance():
    rng = np.random.default_rng(5)
    base = random_solution(rng, l=1.0)
    for l in (0.616, 1.3, 2.0):
        scaled = TrialSolution(base.coeffs, base.lam, base.k, l)
        for tau in (0.2, 1.0, 3.7):
            got = scaled.derivatives(tau)
            ref = base.derivatives(tau / l)
            for p in range(4):
                assert got[p] == pytest.approx(l ** (1 - p) * ref[p], rel=1e-13, abs=1e-15)


# -- skin friction ---------------------------------------------------------------


@pytest.mark.parametrize("lam, expected", [(1.0, 2.0), (0.4, 5.0)])
def test_skin_friction_examples(lam, expected):
    assert TrialSolution.zero(8, lam, l=1.0).skin_friction() == pytest.approx(expected)


def test_skin_friction_against_extrapolated_curvature():
    rng = np.random.default_rng(2)
    # the basis part dies off like exp(-(ln h)^2 / (2 k^2)), so h must be tiny
    h = 1e-20
    for _ in range(10):
        sol = random_solution(rng, N=15)
        f2 = sol.derivatives(np.array([h, 2 * h]))[2]
        estimate = 2 * f2[0] - f2[1]
        assert estimate == pytest.approx(sol.skin_friction(), rel=1e-6)


def test_wall_approach_is_slow_in_tau():
    # at moderate tau the basis still bends F'' away from its wall value
    sol = TrialSolution(np.eye(16)[3], 1.0, k=3.0, l=1.0)
    assert abs(sol.evaluate(1e-4, 2) - sol.skin_friction()) > 1e-3


# -- serialization ---------------------------------------------------------------


def test_json_round_trip():
    rng = np.random.default_rng(9)
    sol = random_solution(rng)
    params = ProblemParams(2.0, 50.0)
    doc = json.loads(json.dumps(solution_to_dict(sol, params)))
    assert list(doc) == ["m", "M", "N", "k", "l", "lambda", "coeffs"]
    back, back_params = solution_from_dict(doc)
    assert back_params == params
    tau = np.linspace(0, 6, 50)
    assert np.array_equal(back.derivatives(tau), sol.derivatives(tau))


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"m": 0, "M": 1, "k": 2, "l": 1, "lambda": 1},
        {"m": 0, "M": 1, "k": 2, "l": 1, "lambda": -1, "coeffs": [0.0]},
        {"m": 0, "M": 1, "N": 3, "k": 2, "l": 1, "lambda": 1, "coeffs": [0.0]},
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(ValueError):
        solution_from_dict(doc)
