import numpy as np
import pytest

from svdsvm_ids.errors import DegenerateLabels, DimensionMismatch
from svdsvm_ids.kernels import Linear, Polynomial, Rbf, Sigmoid
from svdsvm_ids.svm import (
    BinarySvmModel,
    SvmEnsemble,
    TrainConfig,
    decision_value,
    dual_objective,
    predict,
    smo_solve,
    smo_train_binary,
    train_ovr,
)

from oracles import dual_max_active_sets, dual_max_projected_gradient


def kkt_violations(model, x, y, alpha, C):
    f = model.decision_function(x)
    margin = y * f
    at_zero = alpha == 0
    at_c = alpha == C
    free = ~at_zero & ~at_c
    worst = 0.0
    if at_zero.any():
        worst = max(worst, float(np.max(1 - margin[at_zero])))
    if free.any():
        worst = max(worst, float(np.max(np.abs(margin[free] - 1))))
    if at_c.any():
        worst = max(worst, float(np.max(margin[at_c] - 1)))
    return worst


def full_alpha(model, n):
    alpha = np.zeros(n)
    alpha[model.support_indices] = np.abs(model.coefficients)
    return alpha


@pytest.fixture
def two_point():
    return smo_train_binary(np.array([[-1.0], [1.0]]), np.array([-1, 1]), Linear(),
                            TrainConfig(penalty_c=10))


def test_two_point_dual(two_point):
    assert np.allclose(np.abs(two_point.coefficients), [0.5, 0.5], atol=1e-6)
    assert abs(two_point.bias) <= 1e-6
    assert decision_value(two_point, np.array([0.5])) == pytest.approx(0.5, abs=1e-6)
    assert decision_value(two_point, np.array([0.0])) == pytest.approx(0.0, abs=1e-6)


def test_free_support_vectors_on_margin(two_point):
    for sv, coef in zip(two_point.support_vectors, two_point.coefficients):
        y = np.sign(coef)
        assert abs(y * decision_value(two_point, sv) - 1) <= 1e-3


def test_decision_value_dimension(two_point):
    with pytest.raises(DimensionMismatch):
        decision_value(two_point, np.array([0.5, 1.0]))


def blobs(rng, n, sep=4.0, dim=2):
    y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    x = rng.standard_normal((n, dim)) * 0.6 + (sep / 2) * y[:, None]
    return x, y


def test_separable_blobs_training_accuracy(rng):
    x, y = blobs(rng, 20)
    model = smo_train_binary(x, y, Linear(), TrainConfig(penalty_c=10))
    assert np.all(np.sign(model.decision_function(x)) == y)


def test_degenerate_labels():
    with pytest.raises(DegenerateLabels):
        smo_train_binary(np.ones((4, 2)), np.ones(4), Linear())
    with pytest.raises(DegenerateLabels):
        train_ovr(np.ones((4, 2)), ["a"] * 4, Linear())


@pytest.mark.parametrize("kernel", [Linear(), Polynomial(2), Rbf(0.5), Rbf(4.0)],
                         ids=lambda k: k.to_text())
@pytest.mark.parametrize("noisy", [False, True])
def test_box_equality_and_kkt(rng, kernel, noisy):
    cfg = TrainConfig(penalty_c=1.0, kkt_tolerance=1e-3)
    for _ in range(3):
        x, y = blobs(rng, 60, sep=1.0 if noisy else 5.0, dim=3)
        model = smo_train_binary(x, y, kernel, cfg)
        alpha = full_alpha(model, len(y))
        assert model.converged
        assert alpha.min() >= 0.0 and alpha.max() <= cfg.penalty_c
        assert np.all(np.abs(model.coefficients) > 0)
        assert abs(np.sum(model.coefficients)) <= 1e-6
        assert kkt_violations(model, x, y, alpha, cfg.penalty_c) <= 2 * cfg.kkt_tolerance


SIX_LABELS = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


def test_dual_oracles_agree(rng):
    kernel = Rbf(0.8)
    for _ in range(3):
        x = rng.standard_normal((6, 2))
        gram = kernel.gram(x, x)
        _, exact = dual_max_active_sets(gram, SIX_LABELS, 1.5)
        _, iterative = dual_max_projected_gradient(gram, SIX_LABELS, 1.5)
        assert iterative == pytest.approx(exact, rel=1e-6)


def test_dual_matches_active_set_oracle(rng):
    kernel = Rbf(0.8)
    C = 1.5
    y = SIX_LABELS
    for _ in range(20):
        x = rng.standard_normal((6, 2))
        gram = kernel.gram(x, x)
        _, best = dual_max_active_sets(gram, y, C)
        result = smo_solve(x, y, kernel, TrainConfig(penalty_c=C, kkt_tolerance=1e-6))
        assert dual_objective(result.alpha, y, gram) == pytest.approx(best, rel=1e-3)


def test_objective_monotone_and_nonnegative(rng):
    x, y = blobs(rng, 80, sep=1.0, dim=3)
    for kernel in (Rbf(1.0), Polynomial(2), Sigmoid(0.3, -0.5)):
        result = smo_solve(x, y, kernel, TrainConfig(penalty_c=2.0), trace=True)
        trace = np.array(result.objective_trace)
        assert trace[-1] >= 0
        assert np.all(np.diff(trace) >= -1e-12 * max(1.0, abs(trace[-1])))
        gram = kernel.gram(x, x)
        assert dual_objective(result.alpha, y, gram) == pytest.approx(trace[-1], rel=1e-9, abs=1e-9)


def test_iteration_cap_flags_not_converged(rng, caplog):
    x, y = blobs(rng, 100, sep=0.5)
    model = smo_train_binary(x, y, Rbf(1.0), TrainConfig(max_passes=3))
    assert not model.converged
    assert model.iterations == 3
    assert "without meeting tolerance" in caplog.text


def three_clusters(rng, per=15):
    centers = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])
    x = np.vstack([c + 0.5 * rng.standard_normal((per, 2)) for c in centers])
    labels = [cls for cls in ("a", "b", "c") for _ in range(per)]
    return x, labels, centers


def test_ovr_three_clusters(rng):
    x, labels, centers = three_clusters(rng)
    ens = train_ovr(x, labels, Rbf(2.0), TrainConfig(penalty_c=10))
    assert ens.class_order == ("a", "b", "c")
    assert ens.predict(x) == labels
    assert predict(ens, centers[1]) == "b"


def test_ovr_deterministic_and_thread_independent(rng):
    x, labels, _ = three_clusters(rng)
    a = train_ovr(x, labels, Rbf(2.0), TrainConfig(), n_jobs=1)
    b = train_ovr(x, labels, Rbf(2.0), TrainConfig(), n_jobs=3)
    for ma, mb in zip(a.models, b.models):
        assert np.array_equal(ma.coefficients, mb.coefficients)
        assert np.array_equal(ma.support_vectors, mb.support_vectors)
        assert ma.bias == mb.bias


def _constant_model(value, dim=2):
    return BinarySvmModel(support_vectors=np.zeros((1, dim)), coefficients=np.zeros(1),
                          bias=value, kernel=Linear())


def test_predict_tie_goes_to_earlier_class():
    ens = SvmEnsemble(("a", "b", "c"), (_constant_model(0.2), _constant_model(0.7), _constant_model(0.7)))
    assert predict(ens, np.zeros(2)) == "b"


def test_predict_scale_invariance(rng):
    x, labels, _ = three_clusters(rng)
    ens = train_ovr(x, labels, Linear(), TrainConfig(penalty_c=5))
    scaled = SvmEnsemble(ens.class_order, tuple(
        BinarySvmModel(m.support_vectors, 3.5 * m.coefficients, 3.5 * m.bias, m.kernel)
        for m in ens.models))
    probe = rng.uniform(-2, 8, (50, 2))
    assert ens.predict(probe) == scaled.predict(probe)


def test_predict_dimension_mismatch(rng):
    x, labels, _ = three_clusters(rng)
    ens = train_ovr(x, labels, Linear())
    with pytest.raises(DimensionMismatch):
        predict(ens, np.zeros(3))
