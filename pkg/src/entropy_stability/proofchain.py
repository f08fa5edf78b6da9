"""Executable versions of the steps that take an approximate solution H to an
exact one: restriction to the boundary, the homogenization limit, the skew
part, potential reconstruction and a window-averaged cocycle correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import DomainError, NumericError, SampleSet, binary_restriction
from .defects import (
    ATOL,
    RTOL,
    entropy_defects,
    symmetry_defects,
)

TO_ZERO, TO_INFINITY = "toZero", "toInfinity"


def restrict_to_F(H):
    """The binary map (x, y) -> H(x, y, 0)."""
    return binary_restriction(H)


# --------------------------------------------------------------------------
# homogenization


@dataclass(frozen=True)
class HomogenizationSchedule:
    alpha: float
    t_values: tuple[float, ...]

    def __post_init__(self):
        if self.alpha == 0:
            raise DomainError("homogenization needs alpha != 0")
        ts = tuple(float(t) for t in self.t_values)
        if not ts or any(t <= 0 for t in ts):
            raise DomainError("schedule t values must be positive")
        # ordered so that the last entry is closest to the limit point
        steps = np.diff(ts)
        if self.alpha > 0 and np.any(steps <= 0):
            raise DomainError("toInfinity schedule must be strictly increasing")
        if self.alpha < 0 and np.any(steps >= 0):
            raise DomainError("toZero schedule must be strictly decreasing")
        object.__setattr__(self, "t_values", ts)

    @property
    def direction(self) -> str:
        return TO_ZERO if self.alpha < 0 else TO_INFINITY

    @classmethod
    def geometric(cls, alpha: float, steps: int = 4, ratio: float = 10.0) -> "HomogenizationSchedule":
        """t = ratio^k (alpha > 0) or ratio^-k (alpha < 0), k = 1..steps."""
        sign = 1 if alpha > 0 else -1
        return cls(alpha, tuple(ratio ** (sign * k) for k in range(1, steps + 1)))


@dataclass(frozen=True)
class HomogenizationResult:
    value: float
    trace: tuple[float, ...]
    t_values: tuple[float, ...]


def homogenize(F, sched: HomogenizationSchedule, x: float, y: float) -> HomogenizationResult:
    """Trace of t^-α F(tx, ty) along the schedule; value is the last entry."""
    if not (x > 0 and y > 0):
        raise DomainError("homogenize needs x, y > 0")
    trace = []
    for t in sched.t_values:
        try:
            w = math.pow(t, -sched.alpha)
        except OverflowError:
            raise NumericError(f"t^-alpha overflows at t={t!r}, alpha={sched.alpha!r}") from None
        if w == 0 or not math.isfinite(w):
            raise NumericError(f"t^-alpha out of range at t={t!r}, alpha={sched.alpha!r}")
        v = w * float(F(t * x, t * y))
        if not math.isfinite(v):
            raise NumericError(f"non-finite homogenization value at t={t!r}")
        trace.append(v)
    return HomogenizationResult(trace[-1], tuple(trace), sched.t_values)


# --------------------------------------------------------------------------
# skew part


def skew_part(F):
    """(x, y) -> (F(x, y) − F(y, x)) / 2, antisymmetric bit for bit."""
    def B(x, y):
        return 0.5 * (np.asarray(F(x, y), float) - np.asarray(F(y, x), float))
    return B


@dataclass(frozen=True)
class SkewBoundReport:
    passed: bool
    lhs: float  # sup |2·skew part of F − G|
    rhs: float  # 4·eps2 + 9·eps1
    chain: float  # sup of the intermediate triangle-inequality sum
    eps1: float
    eps2: float

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def chain_points(S: SampleSet) -> tuple[np.ndarray, np.ndarray]:
    """Interior and boundary triples referenced by the reduction chain from S.

    For each (x, y, z) in S: the permuted triple (z, y, x) for the entropy
    defect, and (x, y, 0), (y, x, 0), (x+y, 0, z), (y+z, 0, x), (z, y, 0)
    for the symmetry defect.
    """
    x, y, z = S.triples.T
    zero = np.zeros_like(x)
    interior = np.vstack([S.triples, np.column_stack([z, y, x])])
    boundary = np.vstack([
        np.column_stack([x, y, zero]),
        np.column_stack([y, x, zero]),
        np.column_stack([x + y, zero, z]),
        np.column_stack([y + z, zero, x]),
        np.column_stack([z, y, zero]),
    ])
    return interior, boundary


def skew_bound_check(H, S: SampleSet, G=None) -> SkewBoundReport:
    """Check sup |2B̂| <= 4ε̂₂ + 9ε̂₁ where B̂ is the skew part of F − G.

    ``G`` is a coboundary fitted to F = H(·, ·, 0); it defaults to the zero
    coboundary. Coboundaries are symmetric, so B̂ is the skew part of F and the
    check holds for every H once ε̂₁ covers the boundary points (x, y, 0).
    """
    if len(S) == 0:
        raise DomainError("empty sample set")
    F = restrict_to_F(H)
    if G is None:
        def G(x, y):
            return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    interior, boundary = chain_points(S)
    eps2 = float(np.max(entropy_defects(H, *interior.T)))
    eps1 = float(max(np.max(symmetry_defects(H, *interior.T)),
                     np.max(symmetry_defects(H, *boundary.T))))
    x, y = S.pairs().T

    def K(a, b):
        return np.asarray(F(a, b), float) - np.asarray(G(a, b), float)

    B = skew_part(K)
    b = B(x, y)
    # the triangle chain: |2B| <= |K - B|(x,y) + |K - B|(y,x) + |F(x,y) - F(y,x)|
    chain = (np.abs(K(x, y) - b) + np.abs(K(y, x) + b)
             + np.abs(np.asarray(F(x, y)) - np.asarray(F(y, x))))
    lhs = float(np.max(np.abs(2 * b)))
    rhs = 4 * eps2 + 9 * eps1
    scale = float(np.max(np.abs(F(x, y))))
    return SkewBoundReport(lhs <= rhs + ATOL + RTOL * scale, lhs, rhs, float(np.max(chain)), eps1, eps2)


# --------------------------------------------------------------------------
# potential reconstruction


@dataclass(frozen=True)
class DecompositionResult:
    h: float
    potential: tuple[float, ...]  # f(h), f(2h), ..., f(nh)
    skew: object  # binary callable, antisymmetric
    residual_sup: float
    residual_argmax: tuple[int, int]

    def potential_table(self) -> dict[float, float]:
        return {(k + 1) * self.h: v for k, v in enumerate(self.potential)}

    def to_dict(self):
        return {
            "h": self.h,
            "potential": [[(k + 1) * self.h, v] for k, v in enumerate(self.potential)],
            "residual_sup": self.residual_sup,
            "residual_argmax": list(self.residual_argmax),
        }


def reconstruct_potential(G, h: float, n: int) -> DecompositionResult:
    """Telescoping potential f on {h, ..., nh} with gauge f(h) = 0.

    f((k+1)h) = f(kh) + f(h) + G(kh, h); the residual is the largest
    |G(ih, jh) − [f((i+j)h) − f(ih) − f(jh)]| over i + j <= n and does not
    depend on the gauge.
    """
    if not h > 0:
        raise DomainError("step h must be positive")
    if n < 2:
        raise DomainError("need n >= 2 grid points")
    f = np.zeros(n + 1)  # f[k] = f(kh); f[0] unused
    for k in range(1, n):
        g = float(G(k * h, h))
        if not math.isfinite(g):
            raise NumericError(f"G({k * h!r}, {h!r}) is not finite")
        f[k + 1] = f[k] + f[1] + g
    i, j = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
    mask = i + j <= n
    i, j = i[mask], j[mask]
    r = np.abs(np.asarray(G(i * h, j * h), float) - (f[i + j] - f[i] - f[j]))
    if not np.all(np.isfinite(r)):
        raise NumericError("non-finite residual in potential reconstruction")
    k = int(np.argmax(r))
    return DecompositionResult(float(h), tuple(float(v) for v in f[1:]), skew_part(G),
                               float(r[k]), (int(i[k]), int(j[k])))


# --------------------------------------------------------------------------
# averaging surrogate for the invariant mean


def average_correct_cocycle(F, R: float, m: int, x: float, y: float) -> float:
    """Window mean over z_j = jR/m of F(x, y+z) + F(y, z) − F(x+y, z).

    For an exact cocycle the bracket equals F(x, y) for every z. Sums are
    numpy's pairwise summation in a fixed order.
    """
    if not R > 0 or m < 1:
        raise DomainError("need R > 0 and m >= 1")
    if not (x > 0 and y > 0):
        raise DomainError("need x, y > 0")
    z = np.arange(1, m + 1, dtype=float) * (R / m)
    xs = np.full_like(z, x)
    ys = np.full_like(z, y)
    bracket = (np.asarray(F(xs, ys + z), float) + np.asarray(F(ys, z), float)
               - np.asarray(F(xs + ys, z), float))
    return float(np.sum(bracket) / m)
