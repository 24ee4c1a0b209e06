import math

import numpy as np
import pytest

from randpred import (
    ConstantClassifier,
    Example,
    HingeLossLinearClassifier,
    LeastSquaresRegressor,
    MeanRegressor,
    PointPredictor,
)


def linear_examples(coef, intercept, n=30, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n, len(coef)))
    y = X @ np.array(coef) + intercept
    return [Example(features=tuple(r), label=float(v)) for r, v in zip(X, y)]


class TestMeanRegressor:
    def test_predicts_training_mean(self):
        examples = [Example((0.0,), 1.0), Example((1.0,), 3.0)]
        model = MeanRegressor().fit(examples)
        assert model.predict((5.0,)) == 2.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            MeanRegressor().fit([])

    def test_requires_fit(self):
        with pytest.raises(RuntimeError):
            MeanRegressor().predict((0.0,))


class TestLeastSquaresRegressor:
    def test_recovers_exact_linear_signal(self):
        examples = linear_examples([1.5, -2.0], 0.3)
        model = LeastSquaresRegressor().fit(examples)
        assert model.fallback_reason is None
        for e in examples:
            assert model.predict(e.features) == pytest.approx(e.label, abs=1e-10)
        assert model.predict((0.5, 0.5)) == pytest.approx(1.5 * 0.5 - 2.0 * 0.5 + 0.3, abs=1e-10)

    def test_rank_deficient_falls_back_to_mean(self):
        # one example, two features: the design cannot have full column rank
        examples = [Example((1.0, 2.0), 5.0)]
        model = LeastSquaresRegressor().fit(examples)
        assert model.fallback_reason is not None
        assert "rank" in model.fallback_reason
        assert model.predict((9.0, 9.0)) == 5.0

    def test_collinear_features_fall_back(self):
        examples = [Example((v, 2 * v), 3 * v) for v in (1.0, 2.0, 3.0, 4.0)]
        model = LeastSquaresRegressor().fit(examples)
        assert model.fallback_reason is not None
        assert model.predict((1.0, 2.0)) == pytest.approx(7.5)

    def test_deterministic(self):
        examples = linear_examples([0.7], -0.1, seed=3)
        a = LeastSquaresRegressor().fit(examples)
        b = LeastSquaresRegressor().fit(examples)
        assert a.predict((0.321,)) == b.predict((0.321,))

    def test_satisfies_protocol(self):
        assert isinstance(LeastSquaresRegressor(), PointPredictor)


class TestConstantClassifier:
    def test_infinite_scores(self):
        assert ConstantClassifier(1).predict((0.0,)) == math.inf
        assert ConstantClassifier(-1).predict((0.0,)) == -math.inf

    def test_rejects_bad_label(self):
        with pytest.raises(ValueError):
            ConstantClassifier(0)


class TestHingeLossLinearClassifier:
    def separable(self, n=40, seed=1, gap=0.15):
        # reject points too close to the separating line so the classes
        # have an actual margin between them
        rng = np.random.default_rng(seed)
        examples = []
        while len(examples) < n:
            x = rng.uniform(-1, 1, size=2)
            if abs(x[0] + x[1]) < gap:
                continue
            examples.append(Example(features=tuple(x), label=1 if x[0] + x[1] > 0 else -1))
        return examples

    def test_separates_separable_data(self):
        examples = self.separable()
        model = HingeLossLinearClassifier().fit(examples)
        assert model.fallback_reason is None
        correct = sum(
            1 for e in examples if (model.predict(e.features) > 0) == (e.label > 0)
        )
        assert correct == len(examples)

    def test_two_point_symmetry(self):
        examples = [Example((-1.0,), -1), Example((1.0,), 1)]
        model = HingeLossLinearClassifier().fit(examples)
        assert model.predict((0.0,)) == pytest.approx(0.0, abs=1e-9)
        assert model.predict((1.0,)) > 0 > model.predict((-1.0,))

    def test_single_class_falls_back(self):
        examples = [Example((0.0,), 1), Example((1.0,), 1)]
        model = HingeLossLinearClassifier().fit(examples)
        assert model.fallback_reason is not None
        assert model.predict((5.0,)) == math.inf

    def test_rejects_non_sign_labels(self):
        with pytest.raises(ValueError):
            HingeLossLinearClassifier().fit([Example((0.0,), 2)])

    def test_deterministic_without_seed(self):
        examples = self.separable(seed=5)
        a = HingeLossLinearClassifier().fit(examples)
        b = HingeLossLinearClassifier().fit(examples)
        assert a.predict((0.2, -0.4)) == b.predict((0.2, -0.4))

    def test_seeded_init_reproducible(self):
        examples = self.separable(seed=6)
        a = HingeLossLinearClassifier(seed=11).fit(examples)
        b = HingeLossLinearClassifier(seed=11).fit(examples)
        c = HingeLossLinearClassifier(seed=12).fit(examples)
        x = (0.3, 0.3)
        assert a.predict(x) == b.predict(x)
        assert a.predict(x) != c.predict(x)

    def test_hyperparameter_validation(self):
        with pytest.raises(ValueError):
            HingeLossLinearClassifier(learning_rate=0.0)
        with pytest.raises(ValueError):
            HingeLossLinearClassifier(epochs=0)
        with pytest.raises(ValueError):
            HingeLossLinearClassifier(l2=-0.1)
