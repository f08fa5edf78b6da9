"""Projection of a candidate H onto the one-parameter solution families.

The sup norm is the primary metric; least squares seeds the search bracket
and is reported as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    DomainError,
    EpsilonTriple,
    NumericError,
    SampleSet,
    SolutionFamily,
    power_basis,
    shannon_basis,
)

SUP, LSQ = "supNorm", "leastSquares"
DEGENERACY_RTOL = 1e-12


class DegenerateBasisError(NumericError):
    """Every sample point is uninformative for the basis."""


@dataclass(frozen=True)
class FitResult:
    family: SolutionFamily
    residual_sup: float
    residual_l2: float
    metric: str
    c_least_squares: float | None = None
    scale: float = 0.0  # max |H| over the fit points

    @property
    def parameter(self) -> float:
        return self.family.a if self.family.kind == "constant" else self.family.c

    def to_dict(self):
        d = {
            "family": self.family.to_dict(),
            "residual_sup": self.residual_sup,
            "residual_l2": self.residual_l2,
            "metric": self.metric,
        }
        if self.c_least_squares is not None:
            d["c_least_squares"] = self.c_least_squares
        return d


def sup_objective(h: np.ndarray, g: np.ndarray, c: float) -> float:
    return float(np.max(np.abs(h - c * g)))


def ternary_search(obj, lo: float, hi: float, max_iter: int = 2000) -> float:
    """Minimiser of a convex function on [lo, hi].

    Runs until the bracket stops shrinking in floating point, which is finer
    than 1e-12·(1 + |c|).
    """
    for _ in range(max_iter):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if not (lo < m1 < m2 < hi):
            break
        if obj(m1) <= obj(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def fit_one_parameter(h: np.ndarray, g: np.ndarray, metric: str = SUP):
    """Best c for h ≈ c·g; returns (c, c_least_squares).

    Raises DegenerateBasisError if every |g| <= 1e-12·(1 + max|g|).
    """
    if metric not in (SUP, LSQ):
        raise DomainError(f"unknown metric {metric!r}")
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(g))):
        raise NumericError("non-finite values in fit data")
    gmax = float(np.max(np.abs(g)))
    informative = np.abs(g) > DEGENERACY_RTOL * (1 + gmax)
    if not np.any(informative):
        raise DegenerateBasisError("degenerate basis: every sample point is uninformative")
    c_ls = float(np.sum(h * g) / np.sum(g * g))
    if metric == LSQ:
        return c_ls, c_ls
    l2 = float(np.sqrt(np.sum((h - c_ls * g) ** 2)))
    if l2 == 0.0:
        return c_ls, c_ls
    half = 3 * l2 / float(np.min(np.abs(g[informative])))
    c_star = ternary_search(lambda c: sup_objective(h, g, c), c_ls - half, c_ls + half)
    # floating-point safeguard: never worse than the least-squares seed
    if sup_objective(h, g, c_ls) < sup_objective(h, g, c_star):
        c_star = c_ls
    return c_star, c_ls


def _result(fam, h, fitted, metric, c_ls):
    r = h - fitted
    return FitResult(fam, float(np.max(np.abs(r))), float(np.sqrt(np.sum(r * r))), metric, c_ls,
                     float(np.max(np.abs(h))))


def _values(H, S: SampleSet):
    if len(S) == 0:
        raise DomainError("empty sample set")
    x, y, z = S.triples.T
    return x, y, z, np.asarray(H(x, y, z), float)


def fit_power(H, alpha: float, S: SampleSet, metric: str = SUP) -> FitResult:
    if alpha in (0, 1):
        raise DomainError(
            f"alpha = {alpha:g} is not a power regime; use fit_constant (alpha = 0) "
            "or fit_shannon (alpha = 1)"
        )
    x, y, z, h = _values(H, S)
    g = power_basis(x, y, z, alpha)
    c, c_ls = fit_one_parameter(h, g, metric)
    return _result(SolutionFamily.power(c, alpha), h, c * g, metric, c_ls)


def fit_shannon(H, S: SampleSet, metric: str = SUP) -> FitResult:
    x, y, z, h = _values(H, S)
    s = shannon_basis(x, y, z)
    c, c_ls = fit_one_parameter(h, s, metric)
    return _result(SolutionFamily.shannon(c), h, c * s, metric, c_ls)


def fit_constant(H, S: SampleSet) -> FitResult:
    """Midrange of H over S, the exact sup-norm best constant."""
    _, _, _, h = _values(H, S)
    if not np.all(np.isfinite(h)):
        raise NumericError("non-finite values in fit data")
    lo, hi = float(np.min(h)), float(np.max(h))
    a = 0.5 * (lo + hi)
    return _result(SolutionFamily.constant(a), h, np.full_like(h, a), SUP, None)


def fit_regime(H, alpha: float, S: SampleSet, metric: str = SUP) -> FitResult:
    """Fit the family that the declared degree alpha calls for."""
    if alpha == 0:
        return fit_constant(H, S)
    if alpha == 1:
        return fit_shannon(H, S, metric)
    return fit_power(H, alpha, S, metric)


def theorem_bound(alpha: float, eps: EpsilonTriple) -> float:
    """Distance to the nearest exact solution guaranteed by the stability theorem."""
    if alpha == 0:
        return 8 * eps.eps3 + 25 * eps.eps2 + 49 * eps.eps1
    return eps.eps1 + eps.eps2

