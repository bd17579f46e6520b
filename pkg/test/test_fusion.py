# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import tempfile
import unittest
from pathlib import Path
import numpy as np
from pyaxiology.common import ValueDimension
from pyaxiology.errors import DataFormatError, RejectedInputError
from pyaxiology.model.fusion import FusionHead, fuse_emotion_features, read_labeled_text, text_features
from pyaxiology.model.value_model import ValueModel
from pyaxiology.vector import ValueVector


class TestFusion(unittest.TestCase):
    def test_zero_head_is_uniform(self):
        head = FusionHead.zeros(4, 6)
        p = fuse_emotion_features(np.ones(6), ValueVector.unit(ValueDimension.HEDONISM), head)
        np.testing.assert_allclose([0.25] * 4, p)

    def test_distribution(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            head = FusionHead(rng.normal(size=(5, 13)), rng.normal(size=5))
            p = fuse_emotion_features(rng.normal(size=3), rng.uniform(-1, 1, size=10), head)
            self.assertLessEqual(abs(p.sum() - 1.0), 1e-9)
            self.assertTrue(np.all(p >= 0))

    def test_ablation(self):
        rng = np.random.default_rng(1)
        head = FusionHead(rng.normal(size=(3, 14)), rng.normal(size=3))
        h = rng.normal(size=4)
        ablated = head.without_values()
        expected = head.text_only(h)
        for _ in range(20):
            v = ValueVector(tuple(rng.uniform(-1, 1, size=10)))
            np.testing.assert_array_equal(expected, fuse_emotion_features(h, v, ablated))
        self.assertFalse(np.array_equal(expected, fuse_emotion_features(h, v, head)))

    def test_dimension_mismatch(self):
        head = FusionHead.zeros(3, 4)
        with self.assertRaises(RejectedInputError):
            fuse_emotion_features(np.zeros(5), ValueVector.zeros(), head)
        with self.assertRaises(RejectedInputError):
            fuse_emotion_features(np.zeros(4), np.zeros(9), head)
        with self.assertRaises(RejectedInputError):
            FusionHead(np.zeros((3, 10)), np.zeros(3))
        with self.assertRaises(RejectedInputError):
            FusionHead(np.zeros((3, 12)), np.zeros(2))

    def test_fit_uses_values(self):
        rng = np.random.default_rng(2)
        n = 300
        classes = rng.integers(0, 2, size=n)
        values = rng.uniform(-0.1, 0.1, size=(n, 10))
        values[:, ValueDimension.BENEVOLENCE.index] = np.where(classes == 1, 0.8, -0.8)
        text = rng.normal(size=(n, 5))
        head = FusionHead.fit(text, values, classes, labels=("sad", "joyful"))
        self.assertEqual(("sad", "joyful"), head.labels)
        predicted = [int(np.argmax(fuse_emotion_features(h, v, head))) for h, v in zip(text, values)]
        self.assertGreaterEqual(np.mean(np.array(predicted) == classes), 0.95)
        self.assertGreater(abs(head.weights[1, 5 + ValueDimension.BENEVOLENCE.index]), 0.1)

    def test_fit_rejects_bad_classes(self):
        with self.assertRaises(RejectedInputError):
            FusionHead.fit(np.zeros((2, 3)), np.zeros((2, 10)), [0, 2], n_classes=2)
        with self.assertRaises(RejectedInputError):
            FusionHead.fit(np.zeros((2, 3)), np.zeros((2, 10)), [0])

    def test_text_features(self):
        model = ValueModel(hash_dim=64, embed_dim=3, seed=4)
        np.testing.assert_array_equal(np.zeros(3), text_features(model, ""))
        indices = model.ngram_indices("I miss mom")
        np.testing.assert_allclose(model.embeddings[indices].mean(axis=0), text_features(model, "I miss mom"))

    def test_read_labeled_text(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "dialogues.tsv"
            path.write_text("joyful\tI got promoted\n\nsad\tI miss mom\n", encoding="utf-8")
            self.assertEqual([("joyful", "I got promoted"), ("sad", "I miss mom")], read_labeled_text(path))
            path.write_text("joyful I got promoted\n", encoding="utf-8")
            with self.assertRaises(DataFormatError) as ctx:
                read_labeled_text(path)
            self.assertEqual(1, ctx.exception.line)


if __name__ == "__main__":
    unittest.main()
