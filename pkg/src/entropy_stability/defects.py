"""Pointwise defects of the symmetry, entropy, homogeneity and cocycle relations,
and their finite-sample suprema.

Suprema are maxima over a SampleSet, so they under-estimate the true sup over
the cone. Ties in the argmax go to the lexicographically smallest point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import PERMUTATIONS, DomainError, NumericError, Point3, SampleSet

SYMMETRY, ENTROPY, HOMOGENEITY, COCYCLE = "symmetry", "entropy", "homogeneity", "cocycle"
KINDS = (SYMMETRY, ENTROPY, HOMOGENEITY, COCYCLE)

ATOL = 1e-9
RTOL = 1e-9


def within(lhs, rhs, scale=0.0, atol=ATOL, rtol=RTOL) -> bool:
    """``lhs <= rhs`` under the absolute-plus-relative float convention."""
    return bool(lhs <= rhs + atol + rtol * scale)


# vectorised kernels ------------------------------------------------------


def symmetry_defects(H, x, y, z):
    """max over the six permutations σ of |H(p) − H(σ(p))|."""
    coords = (np.asarray(x, float), np.asarray(y, float), np.asarray(z, float))
    base = H(*coords)
    out = np.zeros_like(base)
    for perm in PERMUTATIONS[1:]:
        out = np.maximum(out, np.abs(base - H(*perm.apply(coords))))
    return out


def entropy_defects(H, x, y, z):
    x, y, z = (np.asarray(v, float) for v in (x, y, z))
    zero = np.zeros_like(x)
    return np.abs(H(x, y, z) - H(x + y, zero, z) - H(x, y, zero))


def homogeneity_defects(H, alpha, t, x, y):
    t, x, y = np.broadcast_arrays(*(np.asarray(v, float) for v in (t, x, y)))
    zero = np.zeros_like(x)
    return np.abs(H(t * x, t * y, zero) - np.power(t, alpha) * H(x, y, zero))


def cocycle_defects(F, x, y, z):
    x, y, z = (np.asarray(v, float) for v in (x, y, z))
    return np.abs(F(x + y, z) + F(x, y) - F(x, y + z) - F(y, z))


# scalar wrappers -----------------------------------------------------------


def _as_point(p) -> Point3:
    return p if isinstance(p, Point3) else Point3(*map(float, p))


def symmetry_defect_at(H, p) -> float:
    p = _as_point(p)
    return float(symmetry_defects(H, p.x, p.y, p.z))


def entropy_defect_at(H, p) -> float:
    p = _as_point(p)
    if not p.interior:
        raise DomainError(f"entropy defect is defined on interior points only, got {p.as_tuple()}")
    return float(entropy_defects(H, p.x, p.y, p.z))


def homogeneity_defect_at(H, alpha: float, t: float, x: float, y: float) -> float:
    if not (t > 0 and x > 0 and y > 0):
        raise DomainError("homogeneity defect needs t, x, y > 0")
    return float(homogeneity_defects(H, alpha, t, x, y))


def cocycle_defect_at(F, x: float, y: float, z: float) -> float:
    if not (x > 0 and y > 0 and z > 0):
        raise DomainError("cocycle defect needs x, y, z > 0")
    return float(cocycle_defects(F, x, y, z))


# suprema ---------------------------------------------------------------------


@dataclass(frozen=True)
class DefectReport:
    kind: str
    sup: float
    argmax: tuple[float, ...]
    scale: float  # max |H| (or |F|) seen at the sample points; feeds the rtol term
    count: int
    argmax_t: float | None = None
    residuals: tuple | None = None  # ((x, y, z), residual) pairs when retained

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "sup": self.sup,
            "argmax": list(self.argmax),
            "scale": self.scale,
            "count": self.count,
        }
        if self.argmax_t is not None:
            d["argmax_t"] = self.argmax_t
        return d


def _argmax_lex(values: np.ndarray, keys: np.ndarray) -> int:
    top = np.flatnonzero(values == values.max())
    if len(top) == 1:
        return int(top[0])
    sub = keys[top]
    order = np.lexsort(sub.T[::-1])
    return int(top[order[0]])


def sup_defect(kind: str, fn, S: SampleSet, alpha: float | None = None,
               keep_residuals: bool = False) -> DefectReport:
    """Maximum of one pointwise defect over ``S``.

    ``fn`` is a ternary H for symmetry/entropy/homogeneity and a binary F for
    the cocycle defect. Homogeneity ranges over ``S.scale_factors`` times the
    projected pairs ``S.pairs()`` and needs ``alpha``.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown defect kind {kind!r}")
    if len(S) == 0:
        raise DomainError("empty sample set")
    if (kind == HOMOGENEITY) != (alpha is not None):
        raise DomainError("alpha is required for, and only for, the homogeneity defect")
    tri = S.triples
    x, y, z = tri[:, 0], tri[:, 1], tri[:, 2]
    t_col = None
    if kind == SYMMETRY:
        vals = symmetry_defects(fn, x, y, z)
        keys = tri
        scale = np.max(np.abs(fn(x, y, z)))
    elif kind == ENTROPY:
        vals = entropy_defects(fn, x, y, z)
        keys = tri
        scale = np.max(np.abs(fn(x, y, z)))
    elif kind == COCYCLE:
        vals = cocycle_defects(fn, x, y, z)
        keys = tri
        scale = np.max(np.abs(fn(x, y)))
    else:
        pairs = np.unique(S.pairs(), axis=0)
        ts = np.asarray(S.scale_factors, float)
        tt = np.repeat(ts, len(pairs))
        px = np.tile(pairs[:, 0], len(ts))
        py = np.tile(pairs[:, 1], len(ts))
        vals = homogeneity_defects(fn, alpha, tt, px, py)
        zero = np.zeros_like(px)
        scale = max(np.max(np.abs(fn(tt * px, tt * py, zero))), np.max(np.abs(fn(px, py, zero))))
        keys = np.column_stack([px, py, tt])
        t_col = tt
    if not np.all(np.isfinite(vals)):
        raise NumericError(f"non-finite {kind} defect encountered")
    i = _argmax_lex(vals, keys)
    if kind == HOMOGENEITY:
        argmax = (float(keys[i, 0]), float(keys[i, 1]))
        argmax_t = float(t_col[i])
        locs = np.column_stack([t_col * keys[:, 0], t_col * keys[:, 1], np.zeros(len(keys))])
    else:
        argmax = tuple(float(v) for v in keys[i])
        argmax_t = None
        locs = keys
    residuals = None
    if keep_residuals:
        residuals = tuple((tuple(map(float, loc)), float(v)) for loc, v in zip(locs, vals))
    return DefectReport(kind, float(vals[i]), argmax, float(scale), int(len(vals)), argmax_t, residuals)
