# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import hashlib
import json
import tempfile
import unittest
from pathlib import Path
from pyaxiology.util import atomic_write_bytes, atomic_write_text, dump_json, func_params, sha256_file


class TestUtil(unittest.TestCase):
    def test_params(self):
        self.assertEqual(["k", "min_sim"], func_params(Expander.__init__))
        self.assertEqual([], func_params(Expander.run))
        self.assertEqual(["a", "b", "c"], func_params(func))

    def test_dump_json(self):
        text = dump_json({"b": 1, "a": "é"})
        self.assertEqual('{\n  "a": "é",\n  "b": 1\n}\n', text)
        self.assertEqual({"a": "é", "b": 1}, json.loads(text))

    def test_atomic_write(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "out.txt"
            atomic_write_text(path, "first")
            atomic_write_text(path, "second")
            self.assertEqual("second", path.read_text(encoding="utf-8"))
            self.assertEqual(["out.txt"], [p.name for p in path.parent.iterdir()])

    def test_sha256_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "blob.bin"
            data = bytes(range(256)) * 1000
            atomic_write_bytes(path, data)
            self.assertEqual(hashlib.sha256(data).hexdigest(), sha256_file(path))


class Expander:
    def __init__(self, k, min_sim):
        self.k = k
        self.min_sim = min_sim

    def run(self):
        return self.k


def func(a, b, c=10):
    return a + b + c


if __name__ == "__main__":
    unittest.main()
