"""
Exact minimization of j(s) = a s^2 + b s + mu ||w + s d||_1 over s >= 0.

j is convex and piecewise quadratic; its derivative jumps at the
breakpoints sigma_i = -w_i / d_i. The minimizer is located by binary
search over the sorted positive breakpoints, evaluating the one-sided
slopes at each, and closed by the secant root of the affine segment
that brackets the sign change.
"""
import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np

from smsvm.core.errors import InvalidLineSearchProblem, UnboundedLineSearchError

logger = logging.getLogger(__name__)

Side = Literal["left", "right"]


@dataclass(frozen=True)
class LineSearchProblem:
    w: np.ndarray
    d: np.ndarray
    b: float
    a: float
    mu: float
    s_max: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=np.float64))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=np.float64))
        if self.w.shape != self.d.shape:
            raise InvalidLineSearchProblem(f"w has shape {self.w.shape} but d has shape {self.d.shape}")
        if self.a < 0 or self.mu < 0:
            raise InvalidLineSearchProblem("j is convex only for a >= 0 and mu >= 0", a=self.a, mu=self.mu)
        if not np.any(self.d):
            raise InvalidLineSearchProblem("search direction d is zero")
        if self.s_max is not None and self.s_max < 0:
            raise InvalidLineSearchProblem("s_max must be non-negative", s_max=self.s_max)

    @property
    def d_l1(self) -> float:
        return float(np.sum(np.abs(self.d)))

    @property
    def upper_bound(self) -> float:
        """s_max if given, else (|b| + mu ||d||_1) / (2a), or +inf when a = 0."""
        if self.s_max is not None:
            return float(self.s_max)
        if self.a > 0:
            return (abs(self.b) + self.mu * self.d_l1) / (2.0 * self.a)
        return float("inf")

    def value(self, s: float) -> float:
        return float(self.a * s * s + self.b * s + self.mu * np.sum(np.abs(self.w + s * self.d)))


@dataclass(frozen=True)
class LineSearchResult:
    s_star: float
    zero_index: Optional[int]
    slopes_at: Tuple[float, float]
    slope_evals: int = 0
    tied: Tuple[int, ...] = ()


def _positive_breakpoints(w: np.ndarray, d: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    nz = np.flatnonzero(d)
    sigma = -w[nz] / d[nz]
    keep = sigma > 0
    sigma, idx = sigma[keep], nz[keep]
    order = np.argsort(sigma, kind="stable")
    return sigma[order], idx[order]


def breakpoints(w: np.ndarray, d: np.ndarray) -> List[Tuple[float, int]]:
    """
    Positive sigma_i = -w_i / d_i in ascending order, paired with i.
    Coordinates with d_i = 0 have no breakpoint; ties keep index order.
    """
    sigma, idx = _positive_breakpoints(np.asarray(w, dtype=np.float64), np.asarray(d, dtype=np.float64))
    return [(float(s), int(i)) for s, i in zip(sigma, idx)]


def slope_at(problem: LineSearchProblem, s: float, side: Side) -> float:
    """
    One-sided derivative j'(s-) or j'(s+).

    A coordinate sits on its breakpoint when w_i + s d_i == 0 or when
    -w_i / d_i == s as computed; there it contributes -|d_i| on the left
    and +|d_i| on the right.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    w, d = problem.w, problem.d
    z = w + s * d
    with np.errstate(divide="ignore", invalid="ignore"):
        on_break = (d != 0) & ((z == 0) | (-w / d == s))
    terms = np.sign(z) * d
    terms[on_break] = np.abs(d[on_break]) * (1.0 if side == "right" else -1.0)
    return float(2.0 * problem.a * s + problem.b + problem.mu * np.sum(terms))


def minimize_quadratic_l1(problem: LineSearchProblem) -> LineSearchResult:
    """
    Global minimizer of j over [0, s_max].

    zero_index is set when the minimizer is a breakpoint sigma_j, in which
    case the caller may set w_j + s* d_j to exactly zero.

    When several coordinates share that breakpoint, zero_index is the lowest
    index and the others are listed in tied. They are not snapped: at most one
    coordinate joins the zero set per step, so w_i + s* d_i for a tied i may
    keep a roundoff-sized value until a later step zeroes it.
    """
    w, d, a, b, mu = problem.w, problem.d, problem.a, problem.b, problem.mu
    tail_slope = b + mu * problem.d_l1
    if a == 0 and tail_slope <= 0:
        if tail_slope < 0:
            raise UnboundedLineSearchError(
                "j(s) -> -inf: a = 0 and the slope beyond the last breakpoint is negative",
                slope=tail_slope,
            )
        raise InvalidLineSearchProblem("need a > 0 or mu ||d||_1 > -b", a=a, b=b)

    s_max = problem.upper_bound

    slope_lo = slope_at(problem, 0.0, "right")
    if slope_lo >= 0:
        return LineSearchResult(0.0, None, (slope_lo, slope_lo), 0)

    sigma, idx = _positive_breakpoints(w, d)
    # equal sigmas are evaluated together; the slope jumps by their combined mu |d_j|
    uniq, start = np.unique(sigma, return_index=True)
    stop = np.append(start[1:], sigma.size)
    r = uniq.size

    lo, s1, slope1 = -1, 0.0, slope_lo
    hi, s2, slope2 = r, np.inf, (np.inf if a > 0 else tail_slope)
    slope_evals = 0

    while hi > lo + 1:
        k = (lo + hi) // 2
        s = float(uniq[k])
        members = idx[start[k]:stop[k]]
        rest = np.ones(w.size, dtype=bool)
        rest[members] = False
        slope0 = 2.0 * a * s + b + mu * np.sum(np.sign(w[rest] + s * d[rest]) * d[rest])
        jump = mu * np.sum(np.abs(d[members]))
        slope_plus, slope_minus = slope0 + jump, slope0 - jump
        slope_evals += 1

        if slope_minus == 0 or slope_plus == 0 or (slope_minus < 0 < slope_plus):
            if s > s_max:
                break
            tied = tuple(int(i) for i in members[1:])
            logger.debug(f"line search stops on breakpoint s={s:.6g} (index {members[0]}, tied {tied})")
            return LineSearchResult(
                s, int(members[0]), (float(slope_minus), float(slope_plus)), slope_evals, tied
            )
        if slope_plus < 0:
            lo, s1, slope1 = k, s, slope_plus
        else:
            hi, s2, slope2 = k, s, slope_minus

    if np.isinf(s2):
        s_star = s1 - slope1 / (2.0 * a) if a > 0 else s1
    elif slope2 != slope1:
        s_star = (s1 * slope2 - s2 * slope1) / (slope2 - slope1)
    else:
        s_star = s1
    s_star = float(min(max(s_star, s1), s2, s_max))
    s_star = max(s_star, 0.0)

    slopes = (slope_at(problem, s_star, "left"), slope_at(problem, s_star, "right"))
    return LineSearchResult(s_star, None, slopes, slope_evals)
