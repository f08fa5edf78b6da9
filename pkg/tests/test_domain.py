import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropy_stability.domain import (
    PERMUTATIONS,
    DomainError,
    EpsilonTriple,
    Permutation3,
    Point3,
    SampleSpec,
    SolutionFamily,
    check_derivation,
    eval_at,
    eval_solution,
    make_sample_set,
)
from entropy_stability import report

pos = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)
alphas = st.floats(-3, 3).filter(lambda a: abs(a - 1) > 1e-3 and abs(a) > 1e-3)
coefs = st.floats(-10, 10)

families = st.one_of(
    st.builds(SolutionFamily.power, coefs, alphas),
    st.builds(SolutionFamily.shannon, coefs),
    st.builds(SolutionFamily.power, coefs, st.just(0.0)),
)


@pytest.mark.parametrize(
    "fam, p, expected",
    [
        (SolutionFamily.power(1, 2), (1, 1, 1), 6.0),
        (SolutionFamily.power(0, 2), (3, 0.5, 7), 0.0),
        (SolutionFamily.shannon(1), (1, 1, 1), 3 * math.log(3)),
        (SolutionFamily.shannon(1), (1, 1, 2), 6 * math.log(2)),
        (SolutionFamily.power(1, 2), (1, 2, 0), 4.0),
        (SolutionFamily.constant(-2.5), (1, 2, 3), -2.5),
    ],
)
def test_eval_solution_examples(fam, p, expected):
    assert eval_at(fam, Point3(*p)) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_shannon_values_hand_checked():
    assert 3 * math.log(3) == pytest.approx(3.295836866, abs=1e-9)
    assert 6 * math.log(2) == pytest.approx(4.158883083, abs=1e-9)


def test_power_alpha_one_rejected():
    with pytest.raises(DomainError, match="alpha = 1"):
        SolutionFamily.power(1.0, 1.0)


@pytest.mark.parametrize("p", [(-1, 1, 1), (0, 0, 0), (math.nan, 1, 1), (math.inf, 1, 1)])
def test_point_invariants(p):
    with pytest.raises(DomainError):
        Point3(*p)


def test_point_interior_flag():
    assert Point3(1, 2, 3).interior
    assert not Point3(1, 2, 0).interior


def test_permutations_form_a_group():
    assert len(set(PERMUTATIONS)) == 6
    for a in PERMUTATIONS:
        for b in PERMUTATIONS:
            ab = a.compose(b)
            assert ab in PERMUTATIONS
            p = (1.0, 2.0, 3.0)
            assert ab.apply(p) == a.apply(b.apply(p))
    with pytest.raises(DomainError):
        Permutation3((0, 0, 1))


def test_boundary_convention_negative_alpha():
    # x^alpha diverges at 0 for alpha < 0; the zero slot must contribute nothing
    fam = SolutionFamily.power(1.0, -1.5)
    v = eval_at(fam, Point3(1.0, 2.0, 0.0))
    assert v == pytest.approx(3.0**-1.5 - 1.0 - 2.0**-1.5, rel=1e-15)


@given(families, pos, pos, pos)
def test_permutation_invariance(fam, x, y, z):
    base = eval_solution(fam, x, y, z)
    for perm in PERMUTATIONS:
        v = eval_solution(fam, *perm.apply((x, y, z)))
        assert v == pytest.approx(base, rel=1e-12, abs=1e-12 * (1 + abs(base)))


@given(coefs, alphas, pos, pos, pos, st.floats(1e-2, 1e2))
def test_power_homogeneity(c, alpha, x, y, z, t):
    fam = SolutionFamily.power(c, alpha)
    lhs = eval_solution(fam, t * x, t * y, t * z)
    rhs = t**alpha * eval_solution(fam, x, y, z)
    scale = abs(c) * t**alpha * (x + y + z) ** alpha + abs(c) * t**alpha * (x**alpha + y**alpha + z**alpha)
    assert abs(lhs - rhs) <= 1e-12 * (1 + scale)


@given(families, pos, pos, pos)
def test_entropy_equation_exact(fam, x, y, z):
    H = fam
    lhs = H(x, y, z) - H(x + y, 0.0, z) - H(x, y, 0.0)
    mag = max(abs(H(x, y, z)), abs(H(x + y, 0.0, z)), abs(H(x, y, 0.0)))
    assert abs(lhs) <= 1e-9 * (1 + mag)


@given(st.floats(1.1, 16), pos, pos, pos)
def test_shannon_matches_logarithmic_form(base, x, y, z):
    # x log_b x + y log_b y + z log_b z − (x+y+z) log_b(x+y+z)
    fam = SolutionFamily.shannon(-1 / math.log(base))
    lb = lambda t: math.log(t) / math.log(base)
    expected = x * lb(x) + y * lb(y) + z * lb(z) - (x + y + z) * lb(x + y + z)
    assert float(fam(x, y, z)) == pytest.approx(expected, rel=1e-10, abs=1e-10)


@given(coefs, pos, pos, pos)
def test_power_alpha_zero_is_constant(c, x, y, z):
    assert float(SolutionFamily.power(c, 0.0)(x, y, z)) == -2 * c


@pytest.mark.parametrize("c, pairs, expected", [
    (1.0, [(2.0, 3.0)], True),
    (-4.7, [(2.0, 3.0), (0.1, 50.0), (7.0, 7.0)], True),
])
def test_check_derivation(c, pairs, expected):
    assert check_derivation(c, pairs, 1e-12) is expected


def test_check_derivation_rejects_non_derivation():
    # 36 != 2*9 + 3*4
    assert check_derivation(1.0, [(2.0, 3.0)], 1e-12, phi=lambda t: t * t) is False


def test_check_derivation_rejects_bad_args():
    with pytest.raises(DomainError):
        check_derivation(1.0, [(0.0, 1.0)], 1e-9)
    with pytest.raises(DomainError):
        check_derivation(1.0, [(1.0, 1.0)], 0.0)


def test_epsilon_triple_validation():
    with pytest.raises(DomainError):
        EpsilonTriple(-1, 0, 0)
    with pytest.raises(DomainError):
        EpsilonTriple(0, math.inf, 0)


def test_sample_set_degenerate():
    S = make_sample_set(SampleSpec(lo=1, hi=1, per_axis=1, mc_count=0))
    assert S.triples.tolist() == [[1.0, 1.0, 1.0]]


def test_sample_set_default_counts(default_samples):
    assert len(default_samples) == 4096
    assert len(default_samples.scale_factors) == 9
    assert default_samples.scale_factors[0] == pytest.approx(1e-2)
    assert default_samples.scale_factors[-1] == pytest.approx(1e2)


def test_sample_set_bit_identical():
    spec = SampleSpec(per_axis=3, mc_count=50)
    a = report.dumps(make_sample_set(spec, seed=99).to_dict())
    b = report.dumps(make_sample_set(spec, seed=99).to_dict())
    assert a == b
    assert a != report.dumps(make_sample_set(spec, seed=100).to_dict())
    json.loads(a)


def test_sample_set_empty_is_error():
    with pytest.raises(DomainError):
        make_sample_set(SampleSpec(per_axis=0, mc_count=0))


def test_family_roundtrip():
    for fam in (SolutionFamily.power(2.5, -0.5), SolutionFamily.shannon(-1), SolutionFamily.constant(3)):
        assert SolutionFamily.from_dict(fam.to_dict()) == fam
