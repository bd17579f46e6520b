from __future__ import annotations
import hashlib
import json
import logging
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
import numpy as np
from ..calc import softmax
from ..common import ModelMode, ValueDimension
from ..errors import DataFormatError, FormatVersionError, ModeMismatchError, RejectedInputError
from ..util import PathLike, atomic_write_bytes
from ..vector import ValueVector
from .tokenizer import TokenizerConfig, ngrams, tokenize

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = b"PYAXIOLOGY-MODEL\n"
DEFAULT_HASH_SEED = 0x5CA1AB1E
CLASS_VALUES = np.array([-1.0, 0.0, 1.0])
# Largest double below 1; keeps utilities strictly inside (-1, 1) when tanh saturates.
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@lru_cache(maxsize=1 << 20)
def _hash_ngram(ngram: str, hash_seed: int, hash_dim: int) -> int:
    digest = hashlib.blake2b(ngram.encode("utf-8"), digest_size=8, key=hash_seed.to_bytes(8, "little")).digest()
    return int.from_bytes(digest, "little") % hash_dim


@dataclass(frozen=True)
class Features:
    """Hashed n-gram indices of a text plus the prompt index of the queried dimension.

    Args:
        indices (np.ndarray): Hashed n-gram indices, repeated once per occurrence.
        prompt (int): Canonical index of the value dimension.
    """

    indices: np.ndarray
    prompt: int

    @property
    def size(self) -> int:
        """Number of pooled vectors, the prompt included."""
        return len(self.indices) + 1


class ValueModel:
    """Hashed bag-of-n-grams value model.

    A text is represented by the mean of the embeddings of its hashed n-grams and the prompt embedding of the queried
    value dimension. A linear head maps the representation to one regression output or three class logits.

    Args:
        hash_dim (int): Number of hash buckets. Default: 2^18.
        embed_dim (int): Embedding size. Default: 32.
        mode (ModelMode): REGRESSION or CLASSIFICATION.
        tokenizer (TokenizerConfig): Tokenizer settings.
        seed (int): Seed for embedding initialization.
        hash_seed (int): Key of the n-gram hash.
    """

    def __init__(
        self,
        hash_dim: int = 2**18,
        embed_dim: int = 32,
        mode: ModelMode = ModelMode.REGRESSION,
        tokenizer: TokenizerConfig = None,
        seed: int = 0,
        hash_seed: int = DEFAULT_HASH_SEED,
    ):
        if hash_dim < 1 or embed_dim < 1:
            raise RejectedInputError("hash_dim and embed_dim must be positive")
        self.hash_dim = hash_dim
        self.embed_dim = embed_dim
        self.mode = ModelMode(mode)
        self.tokenizer = tokenizer or TokenizerConfig()
        self.seed = seed
        self.hash_seed = hash_seed
        rng = np.random.default_rng(seed)
        bound = 1.0 / math.sqrt(embed_dim)
        self.embeddings = rng.uniform(-bound, bound, size=(hash_dim, embed_dim))
        self.prompts = rng.uniform(-bound, bound, size=(len(ValueDimension), embed_dim))
        outputs = 1 if self.mode == ModelMode.REGRESSION else len(CLASS_VALUES)
        self.head_weights = np.zeros((outputs, embed_dim))
        self.head_bias = np.zeros(outputs)

    def expected_shapes(self) -> dict[str, tuple]:
        """Shape of every parameter tensor by name, in file order."""
        outputs = 1 if self.mode == ModelMode.REGRESSION else len(CLASS_VALUES)
        return {
            "embeddings": (self.hash_dim, self.embed_dim),
            "prompts": (len(ValueDimension), self.embed_dim),
            "head_weights": (outputs, self.embed_dim),
            "head_bias": (outputs,),
        }

    def ngram_indices(self, text: str) -> np.ndarray:
        """Hashed n-gram indices of a text."""
        grams = ngrams(tokenize(text, self.tokenizer), self.tokenizer.ngram_order)
        return np.array([_hash_ngram(g, self.hash_seed, self.hash_dim) for g in grams], dtype=np.int64)

    def pooled(self, features: Features) -> np.ndarray:
        """Mean of the n-gram embeddings and the prompt embedding."""
        return (self.embeddings[features.indices].sum(axis=0) + self.prompts[features.prompt]) / features.size

    def outputs(self, features: Features) -> np.ndarray:
        """Head outputs: one regression score or three class logits."""
        return self.head_weights @ self.pooled(features) + self.head_bias

    def parameters(self) -> dict[str, np.ndarray]:
        """All parameter tensors by name, in file order."""
        return {
            "embeddings": self.embeddings,
            "prompts": self.prompts,
            "head_weights": self.head_weights,
            "head_bias": self.head_bias,
        }

    def save(self, filename: PathLike):
        """Write the model. Identical models produce identical bytes."""
        arrays = self.parameters()
        header = {
            "format_version": FORMAT_VERSION,
            "hash_dim": self.hash_dim,
            "embed_dim": self.embed_dim,
            "mode": self.mode.value,
            "seed": self.seed,
            "hash_seed": self.hash_seed,
            "tokenizer": dict(self.tokenizer),
            "arrays": [{"name": k, "shape": list(v.shape), "dtype": "<f8"} for k, v in arrays.items()],
        }
        head = json.dumps(header, sort_keys=True).encode("utf-8")
        body = b"".join(np.ascontiguousarray(v, dtype="<f8").tobytes() for v in arrays.values())
        atomic_write_bytes(filename, MAGIC + struct.pack("<Q", len(head)) + head + body)

    @classmethod
    def load(cls, filename: PathLike) -> ValueModel:
        """Read a model written by save().

        Raises:
            FormatVersionError: If the file has another format version.
            DataFormatError: If the file is not a model file or is truncated.
        """
        with open(filename, "rb") as f:
            data = f.read()
        if not data.startswith(MAGIC) or len(data) < len(MAGIC) + 8:
            raise DataFormatError(filename, None, None, "not a pyaxiology model file")
        offset = len(MAGIC)
        (head_len,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        try:
            header = json.loads(data[offset : offset + head_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            raise DataFormatError(filename, None, "header", str(err)) from err
        offset += head_len
        if header.get("format_version") != FORMAT_VERSION:
            raise FormatVersionError(
                f"{filename}: format version {header.get('format_version')} is not supported "
                f"(expected {FORMAT_VERSION})",
                field="format_version",
            )
        model = cls.__new__(cls)
        try:
            model.hash_dim = int(header["hash_dim"])
            model.embed_dim = int(header["embed_dim"])
            model.mode = ModelMode(header["mode"])
            model.seed = header["seed"]
            model.hash_seed = header["hash_seed"]
            model.tokenizer = TokenizerConfig.from_dict(header["tokenizer"])
            arrays = header["arrays"]
        except KeyError as err:
            raise DataFormatError(filename, None, str(err.args[0]), "missing header field") from None
        except (TypeError, ValueError) as err:
            raise DataFormatError(filename, None, "header", str(err)) from err
        expected = model.expected_shapes()
        if [a.get("name") for a in arrays] != list(expected):
            raise DataFormatError(filename, None, "arrays", f"expected arrays {list(expected)}")
        for spec in arrays:
            shape = tuple(spec["shape"])
            if shape != expected[spec["name"]]:
                message = f"shape {list(shape)} does not match {list(expected[spec['name']])}"
                raise DataFormatError(filename, None, spec["name"], message)
            end = offset + 8 * int(np.prod(shape))
            if end > len(data):
                raise DataFormatError(filename, None, spec["name"], "file is truncated")
            array = np.frombuffer(data[offset:end], dtype="<f8").astype(np.float64).reshape(shape)
            setattr(model, spec["name"], array)
            offset = end
        if offset != len(data):
            raise DataFormatError(filename, None, None, f"{len(data) - offset} trailing bytes after the last array")
        return model


def featurize(tokens: list[str], dimension: ValueDimension, model: ValueModel) -> Features:
    """Hash the n-grams of a token list and attach the prompt index of a dimension."""
    grams = ngrams(tokens, model.tokenizer.ngram_order)
    indices = np.array([_hash_ngram(g, model.hash_seed, model.hash_dim) for g in grams], dtype=np.int64)
    return Features(indices, dimension.index)


def _regression_utility(model: ValueModel, features: Features) -> float:
    z = float(model.outputs(features)[0])
    u = math.tanh(z / 2.0)  # == 2 * sigmoid(z) - 1
    return max(-_BELOW_ONE, min(_BELOW_ONE, u))


def _check_mode(model: ValueModel, mode: ModelMode):
    if model.mode != mode:
        raise ModeMismatchError(f"Operation needs a {mode.value} model, got a {model.mode.value} model", field="mode")


def predict_utility(model: ValueModel, scenario: str, dimension: ValueDimension) -> float:
    """Utility of a scenario for one dimension, strictly inside (-1, 1).

    Raises:
        ModeMismatchError: If the model is a classification model.
    """
    _check_mode(model, ModelMode.REGRESSION)
    return _regression_utility(model, Features(model.ngram_indices(scenario), dimension.index))


def predict_proba(model: ValueModel, scenario: str, dimension: ValueDimension) -> np.ndarray:
    """Class probabilities over (-1, 0, +1).

    Raises:
        ModeMismatchError: If the model is a regression model.
    """
    _check_mode(model, ModelMode.CLASSIFICATION)
    return softmax(model.outputs(Features(model.ngram_indices(scenario), dimension.index)))


def expected_utility(probabilities) -> float:
    """Sum of class value times class probability."""
    return float(np.dot(CLASS_VALUES, probabilities))


def predict_vector(model: ValueModel, scenario: str) -> ValueVector:
    """Utilities of a scenario for all ten dimensions in canonical order.

    Classification models report the expected utility of their class distribution.
    """
    indices = model.ngram_indices(scenario)
    utilities = []
    for dim in ValueDimension.ordered():
        features = Features(indices, dim.index)
        if model.mode == ModelMode.REGRESSION:
            utilities.append(_regression_utility(model, features))
        else:
            utilities.append(expected_utility(softmax(model.outputs(features))))
    return ValueVector(tuple(utilities))
