# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import tempfile
import unittest
from pathlib import Path
from unittest import mock
import numpy as np
from pyaxiology.common import ModelMode, ValueDimension
from pyaxiology.errors import DivergenceError, ModeMismatchError, RejectedInputError
from pyaxiology.model.evaluate import evaluate
from pyaxiology.model.train import TrainConfig, loss_and_gradients, make_batch, train
from pyaxiology.model.value_model import Features, ValueModel
from pyaxiology.samples import AnnotatedSample, Scenario

BEN = ValueDimension.BENEVOLENCE


def separable_corpus(n: int = 200) -> list[AnnotatedSample]:
    samples = []
    for i in range(n):
        label = 1 if i % 2 else -1
        word = "good" if label == 1 else "bad"
        samples.append(AnnotatedSample(Scenario(f"s{i}", f"{word} {word} {word} item{i}"), BEN, label, 3))
    return samples


def small_corpus() -> list[AnnotatedSample]:
    texts = ["I miss mom", "I lied to my boss", "we won the game", "I stayed home", "I helped a stranger"]
    dims = list(ValueDimension)
    return [
        AnnotatedSample(Scenario(f"s{i}", t), dims[(3 * i) % 10], (i % 3) - 1, 3) for i, t in enumerate(texts)
    ]


class TestGradients(unittest.TestCase):
    def check(self, mode: ModelMode, trials: int = 100):
        rng = np.random.default_rng(42)
        for trial in range(trials):
            model = ValueModel(hash_dim=64, embed_dim=4, mode=mode, seed=trial)
            model.head_weights[:] = rng.normal(size=model.head_weights.shape)
            model.head_bias[:] = rng.normal(size=model.head_bias.shape)
            n = int(rng.integers(1, 4))
            features = [
                Features(rng.integers(0, 64, size=int(rng.integers(0, 6))), int(rng.integers(0, 10))) for _ in range(n)
            ]
            labels = rng.integers(-1, 2, size=n)
            batch = make_batch(features, labels)
            l2 = 0.1
            _, _, grads = loss_and_gradients(model, batch, l2)

            def numeric(array, index):
                old = array[index]
                array[index] = old + 1e-5
                plus = loss_and_gradients(model, batch, l2)[0]
                array[index] = old - 1e-5
                minus = loss_and_gradients(model, batch, l2)[0]
                array[index] = old
                return (plus - minus) / 2e-5

            dense = grads.dense_embeddings(64)
            touched = set(int(r) for r in batch.rows)
            for row in range(64):
                if row not in touched:
                    self.assertFalse(np.any(dense[row]))
                    continue
                for col in range(4):
                    self.assertClose(dense[row, col], numeric(model.embeddings, (row, col)))
            for index in np.ndindex(*model.prompts.shape):
                self.assertClose(grads.prompts[index], numeric(model.prompts, index))
            for index in np.ndindex(*model.head_weights.shape):
                self.assertClose(grads.head_weights[index], numeric(model.head_weights, index))
            for index in np.ndindex(*model.head_bias.shape):
                self.assertClose(grads.head_bias[index], numeric(model.head_bias, index))

    def assertClose(self, analytic, numeric):
        self.assertLessEqual(abs(analytic - numeric), 1e-7 + 1e-4 * abs(numeric), (analytic, numeric))

    def test_regression_gradients(self):
        self.check(ModelMode.REGRESSION)

    def test_classification_gradients(self):
        self.check(ModelMode.CLASSIFICATION)


class TestTrain(unittest.TestCase):
    def test_separable_regression(self):
        samples = separable_corpus()
        model = ValueModel(hash_dim=4096, embed_dim=8, seed=1)
        result = train(model, samples, TrainConfig(learning_rate=0.2, epochs=40, seed=1))
        self.assertEqual(40, len(result.losses))
        self.assertLess(result.losses[-1], result.losses[0])
        self.assertGreaterEqual(evaluate(model, samples).accuracy, 0.95)

    def test_separable_classification(self):
        samples = separable_corpus()
        model = ValueModel(hash_dim=4096, embed_dim=8, mode=ModelMode.CLASSIFICATION, seed=1)
        config = TrainConfig(learning_rate=0.5, epochs=40, seed=1, mode=ModelMode.CLASSIFICATION)
        train(model, samples, config)
        self.assertGreaterEqual(evaluate(model, samples).accuracy, 0.95)

    def test_zero_learning_rate(self):
        model = ValueModel(hash_dim=256, embed_dim=4, seed=3)
        model.head_weights[:] = 0.7
        losses = train(model, small_corpus(), TrainConfig(learning_rate=0.0, epochs=5)).losses
        for loss in losses:
            self.assertAlmostEqual(losses[0], loss, places=12)

    def test_deterministic(self):
        runs = []
        for _ in range(2):
            model = ValueModel(hash_dim=256, embed_dim=4, seed=3)
            result = train(model, small_corpus(), TrainConfig(epochs=5, batch_size=2, seed=8))
            runs.append(result)
        self.assertEqual(runs[0].losses, runs[1].losses)
        for name, array in runs[0].model.parameters().items():
            np.testing.assert_array_equal(array, runs[1].model.parameters()[name])
        with tempfile.TemporaryDirectory() as tmp:
            a, b = Path(tmp) / "a.model", Path(tmp) / "b.model"
            runs[0].model.save(a)
            runs[1].model.save(b)
            self.assertEqual(a.read_bytes(), b.read_bytes())

    def test_duplicated_full_batch(self):
        once = ValueModel(hash_dim=256, embed_dim=4, seed=3)
        twice = ValueModel(hash_dim=256, embed_dim=4, seed=3)
        config = TrainConfig(learning_rate=0.3, epochs=10, batch_size=0)
        a = train(once, small_corpus(), config)
        b = train(twice, small_corpus() * 2, config)
        np.testing.assert_allclose(a.losses, b.losses, rtol=1e-9, atol=1e-12)
        for name, array in once.parameters().items():
            np.testing.assert_allclose(array, twice.parameters()[name], rtol=1e-9, atol=1e-12)

    def test_l2_penalty_in_loss(self):
        model = ValueModel(hash_dim=64, embed_dim=2)
        model.head_weights[:] = [[1.0, 2.0]]
        batch = make_batch([Features(np.array([1]), 0)], [0])
        plain = loss_and_gradients(model, batch, 0.0)[0]
        self.assertAlmostEqual(plain + 0.5 * 0.2 * 5.0, loss_and_gradients(model, batch, 0.2)[0], places=12)

    def test_empty(self):
        with self.assertRaises(RejectedInputError):
            train(ValueModel(hash_dim=8, embed_dim=2), [])

    def test_mode_mismatch(self):
        with self.assertRaises(ModeMismatchError):
            train(ValueModel(hash_dim=8, embed_dim=2), small_corpus(), TrainConfig(mode=ModelMode.CLASSIFICATION))

    def test_divergence(self):
        def nan_losses(model, batch, l2=0.0):
            loss, losses, grads = loss_and_gradients(model, batch, l2)
            return loss, np.full_like(losses, np.nan), grads

        with mock.patch("pyaxiology.model.train.loss_and_gradients", nan_losses):
            with self.assertRaises(DivergenceError) as ctx:
                train(ValueModel(hash_dim=8, embed_dim=2), small_corpus(), TrainConfig(epochs=3))
        self.assertEqual(1, ctx.exception.epoch)

    def test_save_losses(self):
        model = ValueModel(hash_dim=64, embed_dim=2)
        result = train(model, small_corpus(), TrainConfig(epochs=3))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "loss.txt"
            result.save_losses(path)
            lines = path.read_text().splitlines()
        self.assertEqual("# epoch loss", lines[0])
        self.assertEqual(4, len(lines))
        epoch, loss = lines[3].split()
        self.assertEqual("3", epoch)
        self.assertAlmostEqual(result.losses[2], float(loss), places=8)


class TestTrainConfig(unittest.TestCase):
    def test_defaults(self):
        config = TrainConfig()
        values = (config.learning_rate, config.epochs, config.batch_size, config.l2, config.mode)
        self.assertEqual((0.05, 40, 1, 0.0, ModelMode.REGRESSION), values)

    def test_from_dict(self):
        config = TrainConfig.from_dict({"mode": "CLASSIFICATION", "epochs": 3, "unknown": 1})
        self.assertEqual(ModelMode.CLASSIFICATION, config.mode)
        self.assertEqual(3, config.epochs)
        self.assertEqual("CLASSIFICATION", dict(config)["mode"])
        with self.assertRaises(RejectedInputError):
            TrainConfig.from_dict({"unknown": 1}, strict=True)
        with self.assertRaises(RejectedInputError):
            TrainConfig.from_dict({"epochs": 0})

    def test_validate(self):
        with self.assertRaises(RejectedInputError):
            TrainConfig(learning_rate=-1.0)
        with self.assertRaises(RejectedInputError):
            TrainConfig(batch_size=-1)


if __name__ == "__main__":
    unittest.main()
