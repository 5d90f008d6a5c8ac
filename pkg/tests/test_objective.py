import math

import numpy as np
import pytest

from surrogate_ic.models import GaussMeansData, LinRegData
from surrogate_ic.objective import (
    EvaluationError,
    Mode,
    PenaltySpec,
    SurrogateObjective,
    exact_count,
    exact_ic,
    fusion_pk,
    fusion_pk_grad,
    fusion_pk_hess_diag,
    resolve_ic_weight,
    surrogate_ic,
    surrogate_ic_grad,
    surrogate_ic_hess_diag,
    zero_pk,
)
from surrogate_ic.smoothers import Smoother


@pytest.fixture
def reg():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(25, 3))
    return LinRegData(X, X @ [1.0, 0.0, -2.0] + rng.normal(size=25))


def zero_obj(model, k=5.0, family="sech", c=2.0, **kw):
    return SurrogateObjective(model, PenaltySpec(Mode.ZERO, family, c), k, **kw)


def fusion_obj(model, k=5.0, family="sech", c=2.0):
    return SurrogateObjective(model, PenaltySpec(Mode.FUSION, family, c), k)


@pytest.mark.parametrize(
    "weight, n, expected",
    [("aic", 10, 2.0), ("AIC", 10, 2.0), ("bic", 50, math.log(50)), ("gic:3.5", 9, 3.5), (4, 9, 4.0)],
)
def test_ic_weight_presets(weight, n, expected):
    assert resolve_ic_weight(weight, n) == expected


@pytest.mark.parametrize("weight", ["hqc", "gic:", "gic:abc", "gic:-1", 0, -2.0, True])
def test_ic_weight_rejects(weight):
    with pytest.raises(ValueError):
        resolve_ic_weight(weight, 10)


def test_penalty_spec_validation():
    with pytest.raises(ValueError):
        PenaltySpec(Mode.ZERO, "sech", 0.0)
    with pytest.raises(ValueError):
        PenaltySpec("ridge", "sech", 2.0)
    assert PenaltySpec("fusion", "gaussian", 1).mode is Mode.FUSION


def test_zero_theta_has_no_penalty(reg):
    o = zero_obj(reg)
    assert o.value(np.zeros(3)) == -2.0 * reg.loglik(np.zeros(3))


def test_large_k_recovers_full_count(reg):
    theta = np.array([1.0, -1.5, 2.0])
    o = zero_obj(reg, k=500.0, c=3.0)
    assert o.value(theta) == pytest.approx(-2 * reg.loglik(theta) + 9.0, abs=1e-6)


def test_large_k_at_ols_matches_full_model_aic(reg):
    theta = reg.refit(np.ones(3, bool))
    o = zero_obj(reg, k=1e6)
    full_aic = -2 * reg.loglik(theta) + 2 * 3
    assert o.value(theta) == pytest.approx(full_aic, abs=1e-4)


def test_fusion_all_equal_counts_one():
    d = GaussMeansData([0.0, 1.0, 2.0, 3.0], sigma=1.0)
    o = fusion_obj(d, c=1.7)
    mu = np.full(4, 1.5)
    assert o.value(mu) == pytest.approx(-2 * d.loglik(mu) + 1.7)


def test_fusion_saturated_large_k():
    y = np.array([0.0, 1.0, 1.0, 4.0, 9.0])
    d = GaussMeansData(y, sigma=1.0)
    o = fusion_obj(d, k=500.0, c=math.log(5))
    assert o.value(y) == pytest.approx(-2 * d.loglik(y) + math.log(5) * 4, abs=1e-9)


def test_zero_gradient_at_zero_coordinate_is_score_only(reg):
    theta = np.array([0.7, 0.0, -0.3])
    o = zero_obj(reg)
    assert o.grad(theta, 1) == -2.0 * reg.score(theta, 1)


def test_fusion_tied_pair_has_no_penalty_gradient():
    s = Smoother("sech", 3.0)
    assert fusion_pk_grad([0.0, 0.0], 0, s) == 0.0
    assert fusion_pk_grad([0.0, 0.0], 1, s) == 0.0


def test_gaussian_curvature_at_zero(reg):
    theta = np.array([0.7, 0.0, -0.3])
    k, c = 4.0, 2.0
    o = zero_obj(reg, k=k, family="gaussian", c=c)
    # deriv2(0) = -k**2 for the gaussian family
    assert o.hess_diag(theta, 1) == pytest.approx(2 * reg.info(theta, 1) + c * k * k)


def test_single_parameter_fusion():
    s = Smoother("sech", 2.0)
    assert fusion_pk([3.0], s) == 1.0
    assert fusion_pk_grad([3.0], 0, s) == 0.0
    assert fusion_pk_hess_diag([3.0], 0, s) == 0.0


def test_fusion_pk_examples():
    s = Smoother("sech", 500.0)
    assert fusion_pk(np.full(6, 2.0), Smoother("sech", 1.0)) == 1.0
    assert fusion_pk([0.0, 1.0, 3.0, 7.0], s) == pytest.approx(4.0, abs=1e-6)
    assert fusion_pk([0.0, 0.0, 5.0, 5.0, 5.0], s) == pytest.approx(2.0, abs=1e-6)


def test_symmetric_configuration_middle_gradient_vanishes():
    s = Smoother("rational", 1.3)
    assert fusion_pk_grad([-0.8, 0.0, 0.8], 1, s) == 0.0


def test_fusion_gradient_uses_sorted_neighbours():
    s = Smoother("gaussian", 1.0)
    theta = np.array([2.0, -1.0, 0.5])
    # sorted: -1.0, 0.5, 2.0; theta[2] = 0.5 sits between the other two
    expected = -s.deriv1(0.5 - -1.0) + s.deriv1(2.0 - 0.5)
    assert fusion_pk_grad(theta, 2, s) == pytest.approx(expected)


def test_unpenalized_coordinates(reg):
    mask = np.array([False, True, True])
    o = zero_obj(reg, penalized=mask)
    theta = np.array([0.0, 0.0, 1.0])
    assert o.count(theta) == pytest.approx(zero_pk(theta, o.smoother, mask))
    assert o.penalty_grad(theta, 0) == 0.0 and o.penalty_hess(theta, 0) == 0.0
    assert exact_count(theta, Mode.ZERO, mask) == 2
    with pytest.raises(ValueError):
        zero_obj(reg, penalized=[True, False])


def test_intercept_exempt_by_default():
    rng = np.random.default_rng(4)
    X = np.column_stack([np.ones(10), rng.normal(size=10)])
    d = LinRegData(X, rng.normal(size=10), intercept=True)
    assert zero_obj(d).penalized.tolist() == [False, True]


def test_vector_forms_match_coordinate_forms(reg):
    rng = np.random.default_rng(5)
    theta = rng.normal(size=3)
    o = zero_obj(reg, k=2.0, family="rational")
    np.testing.assert_allclose(o.gradient(theta), [o.grad(theta, j) for j in range(3)], rtol=1e-13)
    np.testing.assert_allclose(o.hess_diagonal(theta), [o.hess_diag(theta, j) for j in range(3)], rtol=1e-13)
    d = GaussMeansData(rng.normal(size=6))
    f = fusion_obj(d, k=1.5)
    mu = rng.normal(size=6)
    np.testing.assert_allclose(f.gradient(mu), [f.grad(mu, j) for j in range(6)], rtol=1e-12)
    np.testing.assert_allclose(f.hess_diagonal(mu), [f.hess_diag(mu, j) for j in range(6)], rtol=1e-12)


@pytest.mark.parametrize("mode", list(Mode))
def test_coordinate_slice_agrees_with_full_objective(reg, mode):
    rng = np.random.default_rng(6)
    if mode is Mode.ZERO:
        o, theta = zero_obj(reg, k=3.0), rng.normal(size=3)
    else:
        o, theta = fusion_obj(GaussMeansData(rng.normal(size=5)), k=3.0), rng.normal(size=5)
    for j in range(theta.size):
        phi, dphi = o.coordinate_slice(theta, j)
        for t in (-2.0, theta[j], 0.1, 1.7):
            moved = theta.copy()
            moved[j] = t
            assert phi(t) == pytest.approx(o.value(moved), rel=1e-12)
            g, h = dphi(t)
            assert g == pytest.approx(o.grad(moved, j), rel=1e-10, abs=1e-12)
            assert h == pytest.approx(o.hess_diag(moved, j), rel=1e-10, abs=1e-12)


def test_module_level_aliases(reg):
    o = zero_obj(reg)
    theta = np.array([0.1, 0.2, 0.3])
    assert surrogate_ic(o, theta) == o.value(theta)
    assert surrogate_ic_grad(o, theta, 2) == o.grad(theta, 2)
    assert surrogate_ic_hess_diag(o, theta, 2) == o.hess_diag(theta, 2)


def test_exact_ic_and_counts():
    d = GaussMeansData([0.0, 1.0, 5.0], sigma=1.0)
    mu = np.array([0.5, 0.5, 5.0])
    assert exact_count(mu, Mode.FUSION) == 2
    assert exact_ic(d, mu, 2.0, 2) == pytest.approx(-2 * d.loglik(mu) + 4.0)


def test_input_errors(reg):
    o = zero_obj(reg)
    with pytest.raises(ValueError):
        o.value([1.0, 2.0])
    with pytest.raises(ValueError):
        o.value([1.0, np.nan, 2.0])
    with pytest.raises(IndexError):
        o.grad(np.zeros(3), 3)


class _BrokenModel:
    q, n = 1, 1

    def loglik(self, theta):
        return -math.inf


def test_non_finite_loglik_raises():
    o = SurrogateObjective(_BrokenModel(), PenaltySpec(), 1.0)
    with pytest.raises(EvaluationError):
        o.value([0.0])


def test_with_k_changes_only_sharpness(reg):
    o = zero_obj(reg, k=1.0).with_k(9.0)
    assert o.k == 9.0 and o.smoother.k == 9.0 and o.penalty.ic_weight == 2.0
