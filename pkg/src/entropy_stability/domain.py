"""Core types: points of the cone, solution families, defect budgets, sample sets.

All ternary functions here are evaluated in vectorised form: a callable
``H(x, y, z)`` receives three equally shaped float arrays (or scalars) and
returns an array of the same shape. Single points go through the same path.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class DomainError(ValueError):
    """A precondition on the domain of an operation was violated."""


class NumericError(ArithmeticError):
    """A numeric failure: degenerate basis, overflow, missing tabulated point."""


# --------------------------------------------------------------------------
# points and permutations


@dataclass(frozen=True, order=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"coordinates must be finite and >= 0, got {self.as_tuple()}")
        if self.x + self.y + self.z <= 0:
            raise DomainError("x + y + z must be positive")

    @property
    def interior(self) -> bool:
        return self.x > 0 and self.y > 0 and self.z > 0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def permuted(self, perm: "Permutation3") -> "Point3":
        return Point3(*perm.apply(self.as_tuple()))


@dataclass(frozen=True)
class Permutation3:
    """A permutation of the three coordinate slots; ``slots[i]`` is the source slot of output i."""

    slots: tuple[int, int, int]

    def __post_init__(self):
        if sorted(self.slots) != [0, 1, 2]:
            raise DomainError(f"not a permutation of three slots: {self.slots}")

    def apply(self, coords):
        return tuple(coords[i] for i in self.slots)

    def compose(self, other: "Permutation3") -> "Permutation3":
        """``(self ∘ other)(p) == self.apply(other.apply(p))``."""
        return Permutation3(tuple(other.slots[i] for i in self.slots))


PERMUTATIONS: tuple[Permutation3, ...] = tuple(
    Permutation3(p) for p in itertools.permutations(range(3))
)


# --------------------------------------------------------------------------
# solution families


def _power_term(v, alpha):
    # terms at argument 0 contribute 0, whatever the sign of alpha
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(v > 0, np.power(np.where(v > 0, v, 1.0), alpha), 0.0)
    return out


def _xlogx(v):
    v = np.asarray(v, dtype=float)
    safe = np.where(v > 0, v, 1.0)
    return np.where(v > 0, safe * np.log(safe), 0.0)


def power_basis(x, y, z, alpha: float):
    """(x+y+z)^α − x^α − y^α − z^α with zero arguments dropped."""
    return (
        _power_term(np.add(np.add(x, y), z), alpha)
        - _power_term(x, alpha)
        - _power_term(y, alpha)
        - _power_term(z, alpha)
    )


def shannon_basis(x, y, z):
    """(x+y+z)ln(x+y+z) − x ln x − y ln y − z ln z, with 0·ln 0 = 0."""
    return _xlogx(np.add(np.add(x, y), z)) - _xlogx(x) - _xlogx(y) - _xlogx(z)


POWER, SHANNON, CONSTANT = "power", "shannon", "constant"


@dataclass(frozen=True)
class SolutionFamily:
    """One exact solution: ``power`` (c, alpha), ``shannon`` (c) or ``constant`` (a).

    Use the :meth:`power`, :meth:`shannon` and :meth:`constant` constructors.
    """

    kind: str
    c: float = 0.0
    alpha: float | None = None
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in (POWER, SHANNON, CONSTANT):
            raise DomainError(f"unknown family kind {self.kind!r}")
        if self.kind == POWER:
            if self.alpha is None or not math.isfinite(self.alpha):
                raise DomainError("power family needs a finite alpha")
            if self.alpha == 1:
                raise DomainError(
                    "power family with alpha = 1 is excluded: its basis vanishes "
                    "identically; use the shannon family for alpha = 1"
                )
        for v in (self.c, self.a):
            if not math.isfinite(v):
                raise DomainError("family parameters must be finite")

    @classmethod
    def power(cls, c: float, alpha: float) -> "SolutionFamily":
        return cls(POWER, c=float(c), alpha=float(alpha))

    @classmethod
    def shannon(cls, c: float) -> "SolutionFamily":
        return cls(SHANNON, c=float(c), alpha=1.0)

    @classmethod
    def constant(cls, a: float) -> "SolutionFamily":
        return cls(CONSTANT, a=float(a), alpha=0.0)

    @property
    def degree(self) -> float:
        """Degree of homogeneity of the family."""
        return float(self.alpha)

    def __call__(self, x, y, z):
        return eval_solution(self, x, y, z)

    def to_dict(self) -> dict:
        if self.kind == POWER:
            return {"kind": POWER, "c": self.c, "alpha": self.alpha}
        if self.kind == SHANNON:
            return {"kind": SHANNON, "c": self.c}
        return {"kind": CONSTANT, "a": self.a}

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionFamily":
        kind = d.get("kind")
        if kind == POWER:
            return cls.power(d["c"], d["alpha"])
        if kind == SHANNON:
            return cls.shannon(d["c"])
        if kind == CONSTANT:
            return cls.constant(d["a"])
        raise DomainError(f"unknown family kind {kind!r}")


def eval_solution(fam: SolutionFamily, x, y, z):
    """Evaluate an exact solution at (x, y, z); arrays broadcast.

    >>> float(eval_solution(SolutionFamily.power(1, 2), 1.0, 1.0, 1.0))
    6.0
    """
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if fam.kind == POWER:
        return fam.c * power_basis(x, y, z, fam.alpha)
    if fam.kind == SHANNON:
        return fam.c * shannon_basis(x, y, z)
    return np.full(np.broadcast(x, y, z).shape, fam.a)


def eval_at(fam: SolutionFamily, p: Point3) -> float:
    return float(eval_solution(fam, p.x, p.y, p.z))


def check_derivation(c: float, pairs: Sequence[tuple[float, float]], tol: float,
                     phi: Callable[[float], float] | None = None) -> bool:
    """True iff φ(xy) = xφ(y) + yφ(x) holds on every pair, to ``tol·(1 + |φ(xy)|)``.

    φ defaults to the regular derivation ``c·x·ln x``; ``phi`` overrides it
    (used to check that non-derivations are rejected).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if phi is None:
        def phi(t):
            return c * t * math.log(t)
    for x, y in pairs:
        if x <= 0 or y <= 0:
            raise DomainError(f"derivation check needs positive arguments, got {(x, y)}")
        lhs = phi(x * y)
        if abs(lhs - x * phi(y) - y * phi(x)) > tol * (1 + abs(lhs)):
            return False
    return True


# --------------------------------------------------------------------------
# defect budgets


@dataclass(frozen=True)
class EpsilonTriple:
    eps1: float = 0.0
    eps2: float = 0.0
    eps3: float = 0.0

    def __post_init__(self):
        for v in (self.eps1, self.eps2, self.eps3):
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"epsilon components must be finite and >= 0: {self.as_tuple()}")

    def as_tuple(self):
        return (self.eps1, self.eps2, self.eps3)

    def to_dict(self):
        return {"eps1": self.eps1, "eps2": self.eps2, "eps3": self.eps3}


# --------------------------------------------------------------------------
# ternary functions


CLOSED_FORM, PERTURBED, TABULATED, CUSTOM = "closed-form", "solution+perturbation", "tabulated", "custom"


@dataclass(frozen=True)
class TernaryFunction:
    """A vectorised map D -> R with a representation tag."""

    fn: Callable
    tag: str = CUSTOM
    name: str = ""

    def __call__(self, x, y, z):
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
        return np.asarray(self.fn(x, y, z), dtype=float)

    def at(self, p: Point3) -> float:
        return float(self(p.x, p.y, p.z))

    def __add__(self, other) -> "TernaryFunction":
        if isinstance(other, (int, float)):
            return TernaryFunction(lambda x, y, z: self(x, y, z) + other, self.tag, self.name)
        return TernaryFunction(lambda x, y, z: self(x, y, z) + other(x, y, z), CUSTOM)

    def scaled(self, lam: float) -> "TernaryFunction":
        return TernaryFunction(lambda x, y, z: lam * self(x, y, z), self.tag, self.name)


def solution_function(fam: SolutionFamily) -> TernaryFunction:
    return TernaryFunction(lambda x, y, z: eval_solution(fam, x, y, z), CLOSED_FORM,
                           name=fam.kind)


def projection_x() -> TernaryFunction:
    """The maximally asymmetric H(x, y, z) = x."""
    return TernaryFunction(lambda x, y, z: np.array(x, dtype=float), CUSTOM, "projection_x")


class TabulatedFunction:
    """H known only at tabulated points; any other query raises NumericError."""

    tag = TABULATED

    def __init__(self, rows: Sequence[tuple[float, float, float, float]]):
        self.table: dict[tuple[float, float, float], float] = {}
        for x, y, z, h in rows:
            Point3(x, y, z)
            self.table[(float(x), float(y), float(z))] = float(h)
        if not self.table:
            raise DomainError("tabulated function has no rows")

    def __call__(self, x, y, z):
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
        out = np.empty(x.shape)
        for idx in np.ndindex(x.shape):
            key = (float(x[idx]), float(y[idx]), float(z[idx]))
            try:
                out[idx] = self.table[key]
            except KeyError:
                raise NumericError(f"point {key} is not in the table") from None
        return out

    def at(self, p: Point3) -> float:
        return float(self(p.x, p.y, p.z))

    def interior_points(self) -> np.ndarray:
        pts = [k for k in self.table if all(v > 0 for v in k)]
        return np.array(sorted(pts), dtype=float).reshape(-1, 3)


def read_table(path) -> TabulatedFunction:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["x", "y", "z", "h"]:
            raise DomainError(f"table header must be x,y,z,h, got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append(tuple(float(v) for v in row))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: non-numeric entry") from None
            if len(rows[-1]) != 4:
                raise DomainError(f"{path}:{lineno}: expected 4 columns")
    return TabulatedFunction(rows)


def write_table(path, H, points) -> None:
    with open(path, "w") as fh:
        fh.write("x,y,z,h\n")
        for x, y, z in points:
            fh.write(f"{x!r},{y!r},{z!r},{float(H(x, y, z))!r}\n")


def binary_restriction(H) -> Callable:
    """F(x, y) = H(x, y, 0)."""
    return lambda x, y: H(x, y, np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape))


# --------------------------------------------------------------------------
# sample sets


@dataclass(frozen=True)
class SampleSpec:
    lo: float = 1e-3
    hi: float = 1e3
    per_axis: int = 16
    t_lo: float = 1e-2
    t_hi: float = 1e2
    t_count: int = 9
    mc_count: int = 0
    spacing: str = "log"

    def __post_init__(self):
        if not (self.lo > 0 and self.hi >= self.lo and math.isfinite(self.hi)):
            raise DomainError("grid bounds must satisfy 0 < lo <= hi < inf")
        if not (self.t_lo > 0 and self.t_hi >= self.t_lo and math.isfinite(self.t_hi)):
            raise DomainError("scale range must satisfy 0 < t_lo <= t_hi < inf")
        if self.per_axis < 0 or self.mc_count < 0 or self.t_count < 1:
            raise DomainError("counts must be nonnegative and t_count >= 1")
        if self.spacing not in ("log", "linear"):
            raise DomainError("spacing must be 'log' or 'linear'")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _spaced(lo, hi, n, spacing):
    if n == 1:
        return np.array([lo], dtype=float) if lo == hi else np.array([math.sqrt(lo * hi)])
    if spacing == "log":
        return np.logspace(math.log10(lo), math.log10(hi), n)
    return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class SampleSet:
    triples: np.ndarray  # (N, 3), every row in the open cone
    scale_factors: np.ndarray  # (T,), positive
    seed: int
    spec: SampleSpec = field(default_factory=SampleSpec)

    def __len__(self):
        return len(self.triples)

    def points(self) -> list[Point3]:
        return [Point3(*map(float, row)) for row in self.triples]

    def pairs(self) -> np.ndarray:
        """Triples projected to their first two coordinates."""
        return self.triples[:, :2]

    def extended(self, extra) -> "SampleSet":
        extra = np.asarray(extra, dtype=float).reshape(-1, 3)
        return SampleSet(np.vstack([self.triples, extra]), self.scale_factors, self.seed, self.spec)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "seed": self.seed,
            "triples": self.triples.tolist(),
            "scale_factors": self.scale_factors.tolist(),
        }


def make_sample_set(spec: SampleSpec | None = None, seed: int = 0) -> SampleSet:
    """Lattice over [lo, hi]^3 plus ``mc_count`` seeded log-uniform triples."""
    spec = spec or SampleSpec()
    axis = _spaced(spec.lo, spec.hi, spec.per_axis, spec.spacing) if spec.per_axis else np.empty(0)
    if len(axis):
        grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    else:
        grid = np.empty((0, 3))
    if spec.mc_count:
        rng = np.random.Generator(np.random.PCG64(seed & 0xFFFFFFFFFFFFFFFF))
        u = rng.uniform(math.log(spec.lo), math.log(spec.hi), size=(spec.mc_count, 3))
        grid = np.vstack([grid, np.exp(u)])
    grid = grid[np.all(grid > 0, axis=1)]
    if len(grid) == 0:
        raise DomainError("sample set is empty")
    ts = _spaced(spec.t_lo, spec.t_hi, spec.t_count, "log")
    return SampleSet(grid, ts, int(seed), spec)


def sample_set_from_points(points, scale_factors=(1.0,), seed: int = 0) -> SampleSet:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        raise DomainError("sample set is empty")
    if np.any(pts <= 0):
        raise DomainError("sample triples must lie in the open cone")
    ts = np.asarray(scale_factors, dtype=float)
    if len(ts) == 0 or np.any(ts <= 0):
        raise DomainError("scale factors must be positive")
    return SampleSet(pts, ts, seed, SampleSpec(per_axis=0, mc_count=len(pts)))
