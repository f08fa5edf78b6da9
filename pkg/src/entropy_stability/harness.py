"""Seeded perturbations of exact solutions and the end-to-end stability check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .defects import (
    ATOL,
    ENTROPY,
    HOMOGENEITY,
    RTOL,
    SYMMETRY,
    DefectReport,
    cocycle_defects,
    entropy_defects,
    homogeneity_defects,
    sup_defect,
    symmetry_defects,
)
from .domain import (
    CONSTANT,
    PERTURBED,
    POWER,
    SHANNON,
    DomainError,
    EpsilonTriple,
    SampleSet,
    SampleSpec,
    SolutionFamily,
    TernaryFunction,
    eval_solution,
    make_sample_set,
    power_basis,
    shannon_basis,
)
from .fitting import SUP, FitResult, fit_regime, theorem_bound
from .proofchain import chain_points, restrict_to_F, skew_bound_check

UNIFORM, BUMP, OSCILLATORY = "uniformNoise", "smoothBump", "oscillatory"
WITHIN, EXCEEDS = "withinBound", "exceedsBound"

SEMANTICS_NOTE = (
    "epsilon estimates are maxima over a finite sample set and therefore lower bounds "
    "of the true suprema; withinBound is supporting evidence only, and exceedsBound "
    "does not refute the stability theorem because the true epsilons may be larger"
)

_QUANTUM = float(2**30)  # log-coordinate quantization: step 2^-30


# --------------------------------------------------------------------------
# perturbations


def _splitmix64(v: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = v + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _quantize(v: np.ndarray) -> np.ndarray:
    safe = np.where(v > 0, v, 1.0)
    q = np.rint(np.log(safe) * _QUANTUM).astype(np.int64).view(np.uint64)
    # zero coordinates get their own code, distinct from any log value
    return np.where(v > 0, q, np.uint64(0x7FF0DEADBEEF0000))


def unit_noise(seed: int, x, y, z) -> np.ndarray:
    """Deterministic field in [-1, 1): a counter hash of quantized log-coordinates."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, float) for v in (x, y, z)))
    h = _splitmix64(np.full(x.shape, np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    for v in (x, y, z):
        h = _splitmix64(h ^ _quantize(v))
    u = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return 2.0 * u - 1.0


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str = UNIFORM
    amplitude: float = 0.0
    seed: int = 0
    center: tuple[float, float, float] = (1.0, 1.0, 1.0)
    width: float = 1.0
    omega: float = 7.0

    def __post_init__(self):
        if self.kind not in (UNIFORM, BUMP, OSCILLATORY):
            raise DomainError(f"unknown perturbation kind {self.kind!r}")
        if not (self.amplitude >= 0 and np.isfinite(self.amplitude)):
            raise DomainError("perturbation amplitude must be finite and >= 0")
        if not self.width > 0:
            raise DomainError("bump width must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def field(self, x, y, z) -> np.ndarray:
        d = self.amplitude
        x, y, z = np.broadcast_arrays(*(np.asarray(v, float) for v in (x, y, z)))
        # tiny amplitudes and far-off bump tails legitimately flush to zero
        with np.errstate(under="ignore"):
            if self.kind == UNIFORM:
                raw = d * unit_noise(self.seed, x, y, z)
            elif self.kind == BUMP:
                cx, cy, cz = self.center
                r2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
                raw = d * np.exp(-r2 / (2 * self.width**2))
            else:
                raw = d * np.sin(self.omega * (x + y + z))
        return np.clip(raw, -d, d)

    def to_dict(self):
        d = {"kind": self.kind, "amplitude": self.amplitude, "seed": self.seed}
        if self.kind == BUMP:
            d.update(center=list(self.center), width=self.width)
        if self.kind == OSCILLATORY:
            d["omega"] = self.omega
        return d


def perturb(fam: SolutionFamily, spec: PerturbationSpec) -> TernaryFunction:
    """H = exact family member + clamped perturbation field."""
    def H(x, y, z):
        return eval_solution(fam, x, y, z) + spec.field(x, y, z)
    return TernaryFunction(H, PERTURBED, name=f"{fam.kind}+{spec.kind}")


# --------------------------------------------------------------------------
# measurement and verification


def measure_defects(H, alpha: float, S: SampleSet, keep_residuals=False) -> dict[str, DefectReport]:
    return {
        SYMMETRY: sup_defect(SYMMETRY, H, S, keep_residuals=keep_residuals),
        ENTROPY: sup_defect(ENTROPY, H, S, keep_residuals=keep_residuals),
        HOMOGENEITY: sup_defect(HOMOGENEITY, H, S, alpha=alpha, keep_residuals=keep_residuals),
    }


def measure_epsilons(H, alpha: float, S: SampleSet) -> EpsilonTriple:
    r = measure_defects(H, alpha, S)
    return EpsilonTriple(r[SYMMETRY].sup, r[ENTROPY].sup, r[HOMOGENEITY].sup)


def check_regime(fam: SolutionFamily, alpha: float) -> None:
    """Raise DomainError unless the family is the declared regime's solution.

    The alpha = 0 regime accepts the constant family and the power family
    with alpha = 0, whose interior value is the constant −2c.
    """
    ok = {
        POWER: fam.kind == POWER and fam.alpha == alpha and alpha != 1,
        SHANNON: alpha == 1,
        CONSTANT: alpha == 0,
    }[fam.kind]
    if not ok:
        raise DomainError(
            f"regime mismatch: family {fam.kind} {fam.to_dict()} does not match alpha = {alpha!r}"
        )


@dataclass(frozen=True)
class VerificationReport:
    eps_hat: EpsilonTriple
    defects: dict
    fit: FitResult
    bound: float
    tolerance: float
    verdict: str
    provenance: dict
    semantics_note: str = field(default=SEMANTICS_NOTE)

    @property
    def ratio(self) -> float | None:
        return self.fit.residual_sup / self.bound if self.bound > 0 else None

    def to_dict(self):
        return {
            "eps_hat": self.eps_hat.to_dict(),
            "defects": {k: v.to_dict() for k, v in self.defects.items()},
            "fit": self.fit.to_dict(),
            "bound": self.bound,
            "tolerance": self.tolerance,
            "residual_over_bound": self.ratio,
            "verdict": self.verdict,
            "provenance": self.provenance,
            "semantics_note": self.semantics_note,
        }


def verify_theorem(fam: SolutionFamily, alpha: float, pspec: PerturbationSpec,
                   sspec: SampleSpec | None = None, seed: int = 0,
                   metric: str = SUP, atol: float = ATOL, rtol: float = RTOL,
                   keep_residuals: bool = False) -> VerificationReport:
    """Perturb, measure the epsilons, fit the regime's family and compare to the bound.

    withinBound iff residual_sup <= bound + atol + rtol·max|H| over the sample.
    """
    check_regime(fam, alpha)
    sspec = sspec or SampleSpec()
    S = make_sample_set(sspec, seed)
    H = perturb(fam, pspec)
    reports = measure_defects(H, alpha, S, keep_residuals)
    eps = EpsilonTriple(reports[SYMMETRY].sup, reports[ENTROPY].sup, reports[HOMOGENEITY].sup)
    fit = fit_regime(H, alpha, S, metric)
    bound = theorem_bound(alpha, eps)
    tol = atol + rtol * fit.scale
    verdict = WITHIN if fit.residual_sup <= bound + tol else EXCEEDS
    provenance = {
        "family": fam.to_dict(),
        "alpha": alpha,
        "perturbation": pspec.to_dict(),
        "sample": sspec.to_dict(),
        "sample_seed": seed,
        "sample_size": len(S),
    }
    return VerificationReport(eps, reports, fit, bound, tol, verdict, provenance)


# --------------------------------------------------------------------------
# the reduction chain as a property suite


@dataclass(frozen=True)
class PropertyLine:
    name: str
    lhs: float
    rhs: float
    passed: bool

    def render(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.lhs:.6g} <= {self.rhs:.6g}"

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "passed": self.passed}


def _boundary(a, b):
    return np.column_stack([a, b, np.zeros_like(a)])


def regime_coboundary(fit: FitResult):
    """The fitted exact solution restricted to z = 0, itself a coboundary."""
    fam = fit.family
    if fam.kind == CONSTANT:
        return lambda x, y: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, fam.a / 2)
    if fam.kind == SHANNON:
        return lambda x, y: fam.c * shannon_basis(x, y, np.zeros_like(np.asarray(x, float)))
    return lambda x, y: fam.c * power_basis(x, y, np.zeros_like(np.asarray(x, float)), fam.alpha)


def run_property_suite(H, S: SampleSet, alpha: float | None = None) -> list[PropertyLine]:
    """Every inequality of the reduction chain, with epsilons measured over the
    sample set augmented by the points each inequality references.

    Pointwise forms compare each point against the defects at its own
    referenced points; sup forms compare against the bound constants using augmented sups.
    The alpha = 0 line is evaluated only when ``alpha == 0``.
    """
    if len(S) == 0:
        raise DomainError("empty sample set")
    x, y, z = S.triples.T
    zero = np.zeros_like(x)
    F = restrict_to_F(H)
    interior, boundary = chain_points(S)

    E_xyz = entropy_defects(H, x, y, z)
    E_zyx = entropy_defects(H, z, y, x)
    S_xyz = symmetry_defects(H, x, y, z)
    S_b1 = symmetry_defects(H, x + y, zero, z)
    S_b2 = symmetry_defects(H, y + z, zero, x)
    S_b3 = symmetry_defects(H, z, y, zero)
    S_xy0 = symmetry_defects(H, x, y, zero)

    extra = []
    if alpha == 0:
        extra = [_boundary(2 * x, 2 * y), _boundary(x, x), _boundary(y, y),
                 _boundary(x + y, x + y), np.array([[1.0, 1.0, 0.0]])]
    all_boundary = np.vstack([boundary, *extra])
    eps1 = float(max(np.max(symmetry_defects(H, *interior.T)),
                     np.max(symmetry_defects(H, *all_boundary.T))))
    eps2 = float(np.max(entropy_defects(H, *interior.T)))
    tol_scale = float(np.max(np.abs(H(*all_boundary.T))))
    tol_scale = max(tol_scale, float(np.max(np.abs(H(*interior.T)))))

    def line(name, lhs, rhs):
        lhs, rhs = float(lhs), float(rhs)
        return PropertyLine(name, lhs, rhs, lhs <= rhs + ATOL + RTOL * tol_scale)

    lines = []

    # swap of the outer coordinates: 2 eps2 + eps1
    swap = np.abs(H(x + y, zero, z) + H(x, y, zero) - H(y + z, zero, x) - H(z, y, zero))
    lines.append(line("outer swap pointwise", np.max(swap - (E_xyz + E_zyx + S_xyz)), 0.0))
    lines.append(line("outer swap sup [2*eps2 + eps1]", np.max(swap), 2 * eps2 + eps1))

    # cocycle defect of the boundary restriction: 2 eps2 + 4 eps1
    coc = cocycle_defects(F, x, y, z)
    pw = E_xyz + E_zyx + S_xyz + S_b1 + S_b2 + S_b3
    lines.append(line("cocycle pointwise", np.max(coc - pw), 0.0))
    lines.append(line("cocycle sup [2*eps2 + 4*eps1]", np.max(coc), 2 * eps2 + 4 * eps1))

    # near-symmetry of the restriction: eps1
    asym = np.abs(F(x, y) - F(y, x))
    lines.append(line("F symmetry pointwise", np.max(asym - S_xy0), 0.0))
    lines.append(line("F symmetry sup [eps1]", np.max(asym), eps1))

    # skew part of the cocycle residual: 4 eps2 + 9 eps1
    G = None
    if alpha is not None:
        G = regime_coboundary(fit_regime(H, alpha, S))
    sk = skew_bound_check(H, S, G)
    lines.append(line("skew sup [4*eps2 + 9*eps1]", sk.lhs, 4 * eps2 + 9 * eps1))

    if alpha == 0:
        eps3 = _augmented_eps3(H, S)
        one = np.ones(1)
        dev = np.abs(F(x, y) - F(one, one))
        lines.append(line("alpha=0 sup [4*eps3 + 12*eps2 + 24*eps1]", np.max(dev),
                          4 * eps3 + 12 * eps2 + 24 * eps1))
    return lines


def _augmented_eps3(H, S: SampleSet) -> float:
    """Degree-0 homogeneity defect over the sample pairs and the points the
    alpha = 0 chain references: (2x, 2y), (x, x), (y, y), (x+y, x+y), (1, 1);
    scale factors S.scale_factors ∪ {2, 1/2}, plus t = 1/u on each diagonal
    pair (u, u) so that |F(u, u) − F(1, 1)| is measured directly."""
    x, y = S.pairs().T
    pairs = np.unique(np.vstack([
        np.column_stack([x, y]), np.column_stack([2 * x, 2 * y]),
        np.column_stack([x, x]), np.column_stack([y, y]),
        np.column_stack([x + y, x + y]), [[1.0, 1.0]],
    ]), axis=0)
    ts = np.unique(np.concatenate([S.scale_factors, [2.0, 0.5]]))
    tt = np.repeat(ts, len(pairs))
    px = np.tile(pairs[:, 0], len(ts))
    py = np.tile(pairs[:, 1], len(ts))
    best = float(np.max(homogeneity_defects(H, 0.0, tt, px, py)))
    diag = np.unique(np.concatenate([x, y, x + y]))
    best = max(best, float(np.max(homogeneity_defects(H, 0.0, 1.0 / diag, diag, diag))))
    return best
