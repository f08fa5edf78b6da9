import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropy_stability.defects import (
    COCYCLE,
    ENTROPY,
    HOMOGENEITY,
    SYMMETRY,
    cocycle_defect_at,
    entropy_defect_at,
    homogeneity_defect_at,
    sup_defect,
    symmetry_defect_at,
)
from entropy_stability.domain import (
    DomainError,
    SampleSpec,
    SolutionFamily,
    TernaryFunction,
    make_sample_set,
    projection_x,
    sample_set_from_points,
    shannon_basis,
    solution_function,
)
from entropy_stability.harness import PerturbationSpec, perturb
from entropy_stability.proofchain import restrict_to_F

pos = st.floats(1e-2, 1e2)
P2 = solution_function(SolutionFamily.power(1, 2))


def test_symmetry_examples():
    assert symmetry_defect_at(P2, (1, 2, 3)) == 0
    assert symmetry_defect_at(projection_x(), (1, 2, 3)) == 2
    assert symmetry_defect_at(projection_x(), (1, 1, 1)) == 0


def test_entropy_examples():
    assert entropy_defect_at(solution_function(SolutionFamily.shannon(1)), (1, 1, 2)) <= 1e-12
    assert entropy_defect_at(P2 + 1.0, (0.3, 2.0, 5.0)) == pytest.approx(1.0, abs=1e-12)
    assert entropy_defect_at(solution_function(SolutionFamily.constant(5)), (1, 2, 3)) == 5


def test_entropy_rejects_boundary():
    with pytest.raises(DomainError):
        entropy_defect_at(P2, (1, 2, 0))


@given(pos, pos, pos)
def test_homogeneity_examples(t, x, y):
    v = homogeneity_defect_at(P2, 2.0, t, x, y)
    assert v <= 1e-12 * (1 + t**2 * 2 * x * y)
    C = solution_function(SolutionFamily.constant(3))
    assert homogeneity_defect_at(C, 0.0, t, x, y) == 0


def test_homogeneity_shannon_point():
    S1 = solution_function(SolutionFamily.shannon(1))
    assert homogeneity_defect_at(S1, 1.0, 2.0, 1.0, 1.0) <= 1e-15


@given(pos, pos, st.floats(1e-3, 1e3))
def test_shannon_basis_exactly_one_homogeneous(x, y, t):
    lhs = shannon_basis(t * x, t * y, 0.0)
    rhs = t * shannon_basis(x, y, 0.0)
    mag = t * (x + y) * (abs(np.log(t)) + abs(np.log(x + y)) + 1)
    assert abs(lhs - rhs) <= 1e-12 * mag


@given(pos, pos, pos)
def test_cocycle_examples(x, y, z):
    assert cocycle_defect_at(lambda a, b: a * b, x, y, z) <= 1e-12 * (1 + (x + y + z) ** 2)
    cube = lambda a, b: (a + b) ** 3 - a**3 - b**3
    assert cocycle_defect_at(cube, x, y, z) <= 1e-12 * (1 + (x + y + z) ** 3)
    # (x+y) + x - x - y = x
    assert cocycle_defect_at(lambda a, b: a, x, y, z) == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_sup_defect_entropy_exact(default_samples):
    for fam in (SolutionFamily.power(1.3, 2.5), SolutionFamily.shannon(-0.4)):
        r = sup_defect(ENTROPY, solution_function(fam), default_samples)
        assert r.sup <= 1e-9 * (1 + r.scale)


def test_sup_defect_symmetry_nonvacuous():
    S = sample_set_from_points([(1, 2, 3), (0.5, 0.5, 0.5)])
    r = sup_defect(SYMMETRY, projection_x(), S)
    assert r.sup >= 2
    assert r.argmax == (1.0, 2.0, 3.0)


def test_sup_defect_cocycle(default_samples):
    r = sup_defect(COCYCLE, lambda a, b: a * b, default_samples)
    assert r.sup <= 1e-12 * (1 + r.scale) * 10


def test_sup_defect_keeps_residuals(small_samples):
    H = perturb(SolutionFamily.power(1, 2), PerturbationSpec(amplitude=0.1, seed=3))
    for kind, alpha in ((SYMMETRY, None), (ENTROPY, None), (HOMOGENEITY, 2.0)):
        r = sup_defect(kind, H, small_samples, alpha=alpha, keep_residuals=True)
        assert r.sup == max(v for _, v in r.residuals)
        assert r.sup >= 0
    r = sup_defect(HOMOGENEITY, H, small_samples, alpha=2.0)
    assert r.argmax_t in small_samples.scale_factors


def test_sup_defect_argmax_tie_break():
    # every point has defect 0: the smallest point wins
    S = sample_set_from_points([(3, 1, 1), (1, 2, 1), (1, 1, 5)])
    r = sup_defect(SYMMETRY, P2, S)
    assert r.sup == 0
    assert r.argmax == (1.0, 1.0, 5.0)


def test_sup_defect_argument_checks(small_samples):
    with pytest.raises(DomainError):
        sup_defect(HOMOGENEITY, P2, small_samples)
    with pytest.raises(DomainError):
        sup_defect(SYMMETRY, P2, small_samples, alpha=2.0)
    with pytest.raises(DomainError):
        sup_defect("nope", P2, small_samples)


@given(st.integers(0, 2**32), st.integers(1, 40))
def test_sup_defect_monotone_in_sample_set(seed, extra):
    spec = SampleSpec(lo=0.1, hi=10, per_axis=3, t_count=3)
    S = make_sample_set(spec, seed)
    H = perturb(SolutionFamily.shannon(1), PerturbationSpec(amplitude=0.05, seed=seed))
    rng = np.random.default_rng(seed)
    T = S.extended(rng.uniform(0.1, 10, size=(extra, 3)))
    for kind, alpha in ((SYMMETRY, None), (ENTROPY, None), (HOMOGENEITY, 1.0)):
        assert sup_defect(kind, H, T, alpha=alpha).sup >= sup_defect(kind, H, S, alpha=alpha).sup
    F = restrict_to_F(H)
    assert sup_defect(COCYCLE, F, T).sup >= sup_defect(COCYCLE, F, S).sup


def _random_H(seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=6)

    def H(x, y, z):
        return (w[0] * x + w[1] * y * y + w[2] * np.sin(z) + w[3] * x * y
                + w[4] * np.cos(x + 2 * z) + w[5] * np.sqrt(y + z))
    return TernaryFunction(H)


@given(st.integers(0, 10_000), pos, pos, pos)
def test_pointwise_chain_for_arbitrary_H(seed, x, y, z):
    """The reduction-chain triangle inequalities hold pointwise for any H."""
    H = _random_H(seed)
    E = lambda p: entropy_defect_at(H, p)
    S = lambda p: symmetry_defect_at(H, p)
    h = lambda *p: float(H(*p))
    tol = 1e-9 * (1 + max(abs(h(x + y, 0, z)), abs(h(x, y, 0)), abs(h(y + z, 0, x)), abs(h(z, y, 0)),
                          abs(h(x, y, z)), abs(h(z, y, x))))
    lhs9 = abs(h(x + y, 0, z) + h(x, y, 0) - h(y + z, 0, x) - h(z, y, 0))
    assert lhs9 <= E((x, y, z)) + E((z, y, x)) + S((x, y, z)) + tol
    F = restrict_to_F(H)
    coc = cocycle_defect_at(F, x, y, z)
    rhs = (E((x, y, z)) + E((z, y, x)) + S((x, y, z))
           + S((x + y, 0, z)) + S((y + z, 0, x)) + S((z, y, 0)))
    assert coc <= rhs + tol
    assert abs(float(F(x, y)) - float(F(y, x))) <= S((x, y, 0)) + tol
