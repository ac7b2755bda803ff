"""
Unit tests for optim/linesearch.py
"""
import math

import numpy as np
import pytest

from smsvm.core.errors import InvalidLineSearchProblem, UnboundedLineSearchError
from smsvm.optim.linesearch import (
    LineSearchProblem,
    breakpoints,
    minimize_quadratic_l1,
    slope_at,
)

N_RANDOM = 1000
GRID_POINTS = 100_000


def _problem(w, d, a, b, mu, s_max=None):
    return LineSearchProblem(w=np.array(w, dtype=float), d=np.array(d, dtype=float), a=a, b=b, mu=mu, s_max=s_max)


def _random_problem(rng: np.random.Generator) -> LineSearchProblem:
    m = int(rng.integers(1, 65))
    w = rng.standard_normal(m)
    d = rng.standard_normal(m)
    w[rng.random(m) < 0.2] = 0.0
    d[rng.random(m) < 0.2] = 0.0
    if not np.any(d):
        d[0] = 1.0
    if m >= 2 and rng.random() < 0.3:
        # duplicate breakpoint
        i, j = rng.choice(m, size=2, replace=False)
        w[j], d[j] = w[i], d[i]
    mu = 0.0 if rng.random() < 0.1 else float(rng.uniform(0.01, 2.0))
    return LineSearchProblem(w=w, d=d, a=float(rng.uniform(0.01, 5.0)), b=float(3 * rng.standard_normal()), mu=mu)


def _grid_values(problem: LineSearchProblem, s: np.ndarray) -> np.ndarray:
    """j on a grid via prefix sums of |d_i| |s - sigma_i| over sorted sigma."""
    w, d = problem.w, problem.d
    nz = d != 0
    sigma = -w[nz] / d[nz]
    weight = np.abs(d[nz])
    order = np.argsort(sigma)
    sigma, weight = sigma[order], weight[order]
    c = np.concatenate([[0.0], np.cumsum(weight)])
    cs = np.concatenate([[0.0], np.cumsum(weight * sigma)])
    k = np.searchsorted(sigma, s)
    l1 = s * c[k] - cs[k] + (cs[-1] - cs[k]) - s * (c[-1] - c[k])
    const = np.sum(np.abs(w[~nz]))
    return problem.a * s * s + problem.b * s + problem.mu * (l1 + const)


def _grid_values_direct(problem: LineSearchProblem, s: np.ndarray) -> np.ndarray:
    z = problem.w[None, :] + s[:, None] * problem.d[None, :]
    return problem.a * s * s + problem.b * s + problem.mu * np.abs(z).sum(axis=1)


@pytest.fixture(scope="module")
def random_problems():
    rng = np.random.default_rng(20240101)
    return [_random_problem(rng) for _ in range(N_RANDOM)]


# ---------------------------------------------------------------------------
# breakpoints
# ---------------------------------------------------------------------------

class TestBreakpoints:
    def test_sorted_ratios(self):
        assert breakpoints(np.array([1.0, -1.0]), np.array([-1.0, 2.0])) == [(0.5, 1), (1.0, 0)]

    def test_negative_and_zero_direction_ignored(self):
        assert breakpoints(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == []

    def test_zero_breakpoint_excluded(self):
        assert breakpoints(np.array([0.0]), np.array([1.0])) == []

    def test_duplicates_retained(self):
        bp = breakpoints(np.array([1.0, 2.0, 1.0]), np.array([-1.0, -2.0, -1.0]))
        assert [s for s, _ in bp] == [1.0, 1.0, 1.0]
        assert sorted(i for _, i in bp) == [0, 1, 2]


# ---------------------------------------------------------------------------
# slope_at
# ---------------------------------------------------------------------------

class TestSlopeAt:
    def test_right_slope_at_zero(self):
        p = _problem([1.0], [-1.0], a=1.0, b=0.0, mu=1.0)
        assert slope_at(p, 0.0, "right") == -1.0

    def test_one_sided_at_breakpoint(self):
        p = _problem([1.0], [-1.0], a=1.0, b=0.0, mu=1.0)
        assert slope_at(p, 1.0, "left") == 1.0
        assert slope_at(p, 1.0, "right") == 3.0

    def test_no_penalty_is_smooth(self):
        p = _problem([1.0, -2.0], [-1.0, 0.5], a=1.0, b=-2.0, mu=0.0)
        assert slope_at(p, 0.7, "left") == pytest.approx(-0.6)
        assert slope_at(p, 0.7, "right") == pytest.approx(-0.6)

    def test_zero_weight_counts_abs_direction_on_the_right(self):
        p = _problem([0.0, 1.0], [-2.0, 1.0], a=1.0, b=0.0, mu=1.0)
        assert slope_at(p, 0.0, "right") == 2.0 + 1.0

    def test_bad_side(self):
        p = _problem([1.0], [-1.0], a=1.0, b=0.0, mu=1.0)
        with pytest.raises(ValueError):
            slope_at(p, 0.0, "middle")


# ---------------------------------------------------------------------------
# minimize_quadratic_l1: worked cases
# ---------------------------------------------------------------------------

class TestMinimizeExamples:
    def test_smooth_quadratic(self):
        result = minimize_quadratic_l1(_problem([0.5], [1.0], a=1.0, b=-2.0, mu=0.0))
        assert result.s_star == pytest.approx(1.0)
        assert result.zero_index is None

    def test_nonnegative_initial_slope_returns_zero(self):
        result = minimize_quadratic_l1(_problem([1.0], [-1.0], a=0.1, b=1.0, mu=1.0))
        assert result.s_star == 0.0
        assert result.zero_index is None

    def test_interior_of_first_segment(self):
        p = _problem([1.0], [-1.0], a=1.0, b=0.0, mu=1.0)
        result = minimize_quadratic_l1(p)
        assert result.s_star == pytest.approx(0.5)
        assert result.zero_index is None
        grid = np.linspace(0.0, p.upper_bound, 1_000_001)
        assert abs(grid[np.argmin(_grid_values_direct(p, grid))] - result.s_star) < 1e-6

    def test_stops_on_breakpoint(self):
        p = _problem([1.0], [-1.0], a=1.0, b=-1.5, mu=0.5)
        result = minimize_quadratic_l1(p)
        assert result.s_star == 1.0
        assert result.zero_index == 0
        left, right = result.slopes_at
        assert left <= 0 <= right
        grid = np.linspace(0.0, p.upper_bound, 100_001)
        assert p.value(result.s_star) <= _grid_values_direct(p, grid).min() + 1e-12

    def test_beyond_last_breakpoint(self):
        result = minimize_quadratic_l1(_problem([1.0], [-1.0], a=1.0, b=-10.0, mu=1.0))
        assert result.s_star == pytest.approx(4.5)
        assert result.zero_index is None

    def test_zero_curvature_with_enough_penalty(self):
        result = minimize_quadratic_l1(_problem([1.0], [-1.0], a=0.0, b=-0.5, mu=1.0))
        assert result.s_star == 1.0
        assert result.zero_index == 0

    def test_zero_index_zeroes_coordinate_exactly(self):
        w, d = np.array([0.3, -0.7, 2.0]), np.array([-0.1, 0.2, 0.5])
        result = minimize_quadratic_l1(LineSearchProblem(w=w, d=d, a=0.01, b=-0.5, mu=1.0))
        assert result.zero_index == 1
        j = result.zero_index
        assert result.s_star == -w[j] / d[j]

    def test_duplicate_breakpoints_combine_jumps(self):
        # both coordinates cross zero at s = 1; combined jump 2 mu
        p = _problem([1.0, 1.0], [-1.0, -1.0], a=0.5, b=0.0, mu=1.0)
        result = minimize_quadratic_l1(p)
        assert result.s_star == 1.0
        assert result.zero_index == 0
        assert result.tied == (1,)
        left, right = result.slopes_at
        assert left == pytest.approx(-1.0)
        assert right == pytest.approx(3.0)

    def test_tied_breakpoint_reports_other_members(self):
        p = _problem([1.0, 2.0, -3.0, 0.5], [-1.0, -2.0, 3.0, -0.25], a=0.5, b=0.0, mu=1.0)
        result = minimize_quadratic_l1(p)
        assert result.s_star == 1.0
        assert result.zero_index == 0
        assert result.tied == (1, 2)
        assert 3 not in result.tied

    def test_interior_minimizer_has_no_tied(self):
        result = minimize_quadratic_l1(_problem([0.5], [1.0], a=1.0, b=-2.0, mu=0.0))
        assert result.zero_index is None
        assert result.tied == ()

    def test_respects_explicit_bound(self):
        result = minimize_quadratic_l1(_problem([1.0], [-1.0], a=1.0, b=-10.0, mu=1.0, s_max=2.0))
        assert result.s_star == 2.0


class TestMinimizeErrors:
    def test_unbounded(self):
        with pytest.raises(UnboundedLineSearchError):
            minimize_quadratic_l1(_problem([1.0], [-1.0], a=0.0, b=-2.0, mu=1.0))

    def test_flat_tail_is_ill_posed(self):
        with pytest.raises(InvalidLineSearchProblem):
            minimize_quadratic_l1(_problem([1.0], [-1.0], a=0.0, b=-1.0, mu=1.0))

    def test_zero_direction(self):
        with pytest.raises(InvalidLineSearchProblem):
            _problem([1.0], [0.0], a=1.0, b=0.0, mu=1.0)

    def test_negative_curvature(self):
        with pytest.raises(InvalidLineSearchProblem):
            _problem([1.0], [1.0], a=-1.0, b=0.0, mu=1.0)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidLineSearchProblem):
            _problem([1.0, 2.0], [1.0], a=1.0, b=0.0, mu=1.0)


# ---------------------------------------------------------------------------
# randomized oracle checks
# ---------------------------------------------------------------------------

class TestRandomizedOracle:
    def test_prefix_sum_grid_matches_direct_evaluation(self, random_problems):
        s = np.linspace(0.0, 3.0, 2001)
        for p in random_problems[:20]:
            np.testing.assert_allclose(_grid_values(p, s), _grid_values_direct(p, s), rtol=1e-10, atol=1e-10)

    def test_no_grid_point_beats_returned_step(self, random_problems):
        for p in random_problems:
            result = minimize_quadratic_l1(p)
            s_max = p.upper_bound
            assert 0.0 <= result.s_star <= s_max
            grid_min = _grid_values(p, np.linspace(0.0, s_max, GRID_POINTS)).min()
            assert p.value(result.s_star) <= grid_min + 1e-6 * (1 + abs(grid_min))

    def test_optimality_certificate(self, random_problems):
        for p in random_problems:
            s = minimize_quadratic_l1(p).s_star
            tol = 1e-10 * (1 + abs(p.b) + 2 * p.a * s + p.mu * p.d_l1)
            assert slope_at(p, s, "right") >= -tol
            if s > 0:
                assert slope_at(p, s, "left") <= tol

    def test_slope_sequence_is_non_decreasing(self, random_problems):
        for p in random_problems:
            sigmas = sorted({s for s, _ in breakpoints(p.w, p.d)})
            seq = [slope_at(p, 0.0, "right")]
            for s in sigmas:
                seq.extend([slope_at(p, s, "left"), slope_at(p, s, "right")])
            tol = 1e-9 * (1 + abs(p.b) + p.mu * p.d_l1 + 2 * p.a * (sigmas[-1] if sigmas else 0.0))
            assert np.all(np.diff(seq) >= -tol)

    def test_slope_evaluations_are_logarithmic(self, random_problems):
        for p in random_problems:
            r = len(breakpoints(p.w, p.d))
            assert minimize_quadratic_l1(p).slope_evals <= math.ceil(math.log2(r + 1)) + 2
