# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import json
import os
import random
import unittest
from pathlib import Path
from pyaxiology.common import ValueDimension
from pyaxiology.curation.io import read_samples
from pyaxiology.errors import RejectedInputError
from pyaxiology.model.evaluate import evaluate, evaluate_predictions
from pyaxiology.model.train import TrainConfig, train
from pyaxiology.model.value_model import ValueModel, predict_vector
from pyaxiology.reward.profile import profile_speaker
from pyaxiology.samples import AnnotatedSample, Scenario

BEN = ValueDimension.BENEVOLENCE
POW = ValueDimension.POWER
DATASET_DIR = os.environ.get("PYAXIOLOGY_VALUENET_DIR")


class TestEvaluate(unittest.TestCase):
    def setUp(self):
        self.labels = [1, 1, 1, 1, 1, 0, 0, -1]
        self.utilities = [0.9, 0.8, 0.7, 0.1, -0.9, 0.6, 0.0, -0.8]
        self.dims = [BEN] * 5 + [POW] * 3

    def test_hand_fixture(self):
        report = evaluate_predictions(self.labels, self.utilities, self.dims)
        self.assertAlmostEqual(0.75, report.precision[1])
        self.assertAlmostEqual(0.6, report.recall[1])
        self.assertAlmostEqual(2 / 3, report.f1[1])
        self.assertAlmostEqual(0.5, report.precision[0])
        self.assertAlmostEqual(0.5, report.recall[0])
        self.assertAlmostEqual(0.5, report.precision[-1])
        self.assertAlmostEqual(1.0, report.recall[-1])
        self.assertAlmostEqual(0.625, report.accuracy)
        mse = sum((u - y) ** 2 for u, y in zip(self.utilities, self.labels)) / 8
        self.assertAlmostEqual(mse, report.mse)
        self.assertEqual({-1: 1, 0: 2, 1: 5}, report.support)
        self.assertEqual([[1, 0, 0], [0, 1, 1], [1, 1, 3]], report.confusion)
        self.assertAlmostEqual(0.6, report.per_dimension_accuracy["BEN"])
        self.assertAlmostEqual(2 / 3, report.per_dimension_accuracy["POW"])
        self.assertIsNone(report.per_dimension_accuracy["ACH"])

    def test_rounding(self):
        report = evaluate_predictions([1, -1, 0, 0], [0.5, -0.5, 0.49, -0.49], [BEN] * 4)
        self.assertEqual(1.0, report.accuracy)

    def test_perfect_oracle(self):
        gen = random.Random(1)
        labels = [gen.choice((-1, 0, 1)) for _ in range(300)]
        dims = [gen.choice(list(ValueDimension)) for _ in labels]
        report = evaluate_predictions(labels, [float(y) for y in labels], dims)
        self.assertEqual(1.0, report.accuracy)
        self.assertEqual(0.0, report.mse)
        for c in (-1, 0, 1):
            self.assertEqual(1.0, report.f1[c])

    def test_zero_predictor(self):
        gen = random.Random(2)
        labels = [gen.choice((-1, 0, 1)) for _ in range(300)]
        report = evaluate_predictions(labels, [0.0] * 300, [BEN] * 300)
        nonzero = sum(1 for y in labels if y) / 300
        self.assertAlmostEqual(nonzero, report.mse)
        self.assertAlmostEqual(1 - nonzero, report.accuracy)
        self.assertEqual(0.0, report.precision[1])
        self.assertEqual(0.0, report.f1[-1])

    def test_micro_accuracy(self):
        gen = random.Random(3)
        labels = [gen.choice((-1, 0, 1)) for _ in range(500)]
        utilities = [gen.uniform(-1, 1) for _ in labels]
        dims = [gen.choice(list(ValueDimension)) for _ in labels]
        report = evaluate_predictions(labels, utilities, dims)
        total = sum(
            report.per_dimension_accuracy[d.code] * dims.count(d)
            for d in ValueDimension
            if report.per_dimension_accuracy[d.code] is not None
        )
        self.assertAlmostEqual(report.accuracy, total / 500)

    def test_reports(self):
        report = evaluate_predictions(self.labels, self.utilities, self.dims)
        text = report.to_text()
        lines = text.splitlines()
        for column in ("F1(-1)", "P(0)", "R(+1)", "Acc.", "MSE"):
            self.assertIn(column, lines[0])
        self.assertIn("0.62", lines[1])
        self.assertEqual("", lines[2])
        self.assertEqual(["ACH", "BEN", "CON", "HED", "POW", "SEC", "SD", "STI", "TRA", "UNI"], lines[3].split())
        self.assertEqual("-", lines[4].split()[0])
        data = json.loads(json.dumps(report.to_dict()))
        self.assertEqual(0.75, data["precision"]["1"])
        self.assertIsNone(data["per_dimension_accuracy"]["UNI"])

    def test_invalid(self):
        with self.assertRaises(RejectedInputError):
            evaluate_predictions([], [], [])
        with self.assertRaises(RejectedInputError):
            evaluate_predictions([1], [0.2, 0.3], [BEN])

    def test_evaluate_model(self):
        samples = [
            AnnotatedSample(Scenario("a", "I miss mom"), BEN, 1),
            AnnotatedSample(Scenario("b", "I bossed them around"), POW, 0),
        ]
        report = evaluate(ValueModel(hash_dim=64, embed_dim=2), samples)
        self.assertEqual(0.5, report.accuracy)
        self.assertEqual(0.5, report.mse)
        with self.assertRaises(RejectedInputError):
            evaluate(ValueModel(hash_dim=64, embed_dim=2), [])


@unittest.skipUnless(DATASET_DIR, "PYAXIOLOGY_VALUENET_DIR is not set")
class TestPublishedBaseline(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        root = Path(DATASET_DIR)
        cls.model = ValueModel(hash_dim=2**18, embed_dim=32, seed=0)
        train(cls.model, read_samples(root / "train.jsonl"), TrainConfig(learning_rate=0.05, epochs=5))
        cls.report = evaluate(cls.model, read_samples(root / "test.jsonl"))

    def test_accuracy_and_mse(self):
        self.assertAlmostEqual(0.58, self.report.accuracy, delta=0.05)
        self.assertAlmostEqual(0.66, self.report.mse, delta=0.10)

    def test_missing_mom_is_benevolence(self):
        profile = profile_speaker(["I miss mom"], lambda text: predict_vector(self.model, text))
        best = max(ValueDimension, key=lambda d: profile.profile[d])
        self.assertEqual(ValueDimension.BENEVOLENCE, best)
        self.assertGreater(profile.profile[best], 0.0)


if __name__ == "__main__":
    unittest.main()
