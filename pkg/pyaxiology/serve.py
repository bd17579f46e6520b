"""JSON-over-HTTP service for value scoring, matching rewards and speaker profiles.

Endpoints:
    POST /v1/score    {"texts": [...]}                                   -> {"vectors": [[...10 utilities], ...]}
    POST /v1/reward   {"persona": [...], "utterances": [...], "clamp_terms": false}  -> {"R": ..., "trace": [...]}
    POST /v1/profile  {"utterances": [...], "aggregation": "mean"}       -> {"profile": [...], "per_utterance": [...]}
    GET  /v1/health                                                       -> model checksum and dimension order

Every body may carry "schema_version": 1. Unknown fields are rejected.
"""
from __future__ import annotations
import json
import logging
import threading
from dataclasses import dataclass
from functools import partial, wraps
from typing import Sequence
import requests
from flask import Flask, jsonify, request
from werkzeug.exceptions import HTTPException
from .abstract import Serializable
from .common import CODES
from .errors import (
    RejectedInputError,
    ResponseDecodeError,
    TermOverflowError,
    TransportError,
    ValueFunctionError,
)
from .model.value_model import ValueModel, predict_vector
from .reward.dialogue import reward
from .reward.export import profile_to_dict, trace_to_dict
from .reward.profile import Aggregation, profile_speaker
from .util import sha256_file
from .vector import ValueVector

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_TEXTS = 256


@dataclass
class ServeConfig(Serializable):
    """Service settings.

    Args:
        host (str): Bind address. Default: 127.0.0.1.
        port (int): Bind port. Default: 8080.
        model_path (str): Model file served.
        max_body_bytes (int): Request size limit. Default: 64 KiB.
        max_concurrency (int): Requests handled at once; more are refused with 503. Default: 8.
    """

    host: str = "127.0.0.1"
    port: int = 8080
    model_path: str = ""
    max_body_bytes: int = 64 * 1024
    max_concurrency: int = 8

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 0 <= self.port <= 65535:
            raise RejectedInputError(f"Port out of range: {self.port}", field="port")
        if self.max_body_bytes < 1:
            raise RejectedInputError("max_body_bytes must be positive", field="max_body_bytes")
        if self.max_concurrency < 1:
            raise RejectedInputError("max_concurrency must be positive", field="max_concurrency")


class ApiError(Exception):
    """An error answered with a structured JSON body."""

    def __init__(self, status: int, code: str, message: str, field: str = None, **extra):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field
        self.extra = extra

    def body(self) -> dict:
        body = {"code": self.code, "message": self.message, **self.extra}
        if self.field is not None:
            body["field"] = self.field
        return body


def _read_body(allowed: Sequence[str]) -> dict:
    if request.content_length is not None and request.content_length > request.max_content_length:
        raise ApiError(413, "too_large", f"Body exceeds {request.max_content_length} bytes")
    try:
        body = json.loads(request.get_data(cache=False))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ApiError(400, "malformed_body", f"Body is not valid JSON: {err}") from err
    if not isinstance(body, dict):
        raise ApiError(400, "malformed_body", "Body must be a JSON object")
    for key in body:
        if key != "schema_version" and key not in allowed:
            raise ApiError(400, "unknown_field", f"Unknown field '{key}'", field=key)
    if body.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        message = f"Unsupported schema version, expected {SCHEMA_VERSION}"
        raise ApiError(400, "schema_version", message, field="schema_version")
    return body


def _texts(body: dict, name: str, max_count: int = MAX_TEXTS) -> list[str]:
    texts = body.get(name)
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise ApiError(400, "malformed_field", f"'{name}' must be a list of strings", field=name)
    if not 1 <= len(texts) <= max_count:
        raise ApiError(400, "malformed_field", f"'{name}' must hold 1 to {max_count} strings", field=name)
    return texts


def create_app(model: ValueModel = None, config: ServeConfig = None, model_checksum: str = None) -> Flask:
    """Build the Flask application serving one value model.

    Args:
        model (ValueModel): The model. Endpoints answer 503 while it is None.
        config (ServeConfig): Limits.
        model_checksum (str): SHA-256 of the model file, reported by the health endpoint.
    """
    config = config or ServeConfig()
    app = Flask(__name__)
    app.config["MAX_CONTENT_LENGTH"] = config.max_body_bytes
    slots = threading.BoundedSemaphore(config.max_concurrency)

    def value_fn():
        if model is None:
            raise ApiError(503, "model_unavailable", "No model is loaded")
        return partial(predict_vector, model)

    def limited(handler):
        @wraps(handler)
        def wrapper():
            if not slots.acquire(blocking=False):
                raise ApiError(503, "overloaded", "Too many concurrent requests")
            try:
                return handler()
            finally:
                slots.release()

        return wrapper

    @app.errorhandler(ApiError)
    def api_error(err: ApiError):
        return jsonify(err.body()), err.status

    @app.errorhandler(HTTPException)
    def http_error(err: HTTPException):
        return jsonify({"code": err.name.lower().replace(" ", "_"), "message": err.description}), err.code

    @app.errorhandler(RejectedInputError)
    def rejected(err: RejectedInputError):
        return jsonify(ApiError(400, "rejected_input", str(err), err.field).body()), 400

    @app.errorhandler(ValueFunctionError)
    def value_function_failed(err: ValueFunctionError):
        return jsonify({"code": "value_function", "message": str(err)}), 500

    @app.get("/v1/health")
    def health():
        return jsonify(
            {
                "status": "ok" if model is not None else "unavailable",
                "model_sha256": model_checksum,
                "dimensions": list(CODES),
                "schema_version": SCHEMA_VERSION,
            }
        )

    @app.post("/v1/score")
    @limited
    def score():
        body = _read_body(("texts",))
        texts = _texts(body, "texts")
        fn = value_fn()
        return jsonify({"schema_version": SCHEMA_VERSION, "vectors": [fn(t).to_list() for t in texts]})

    @app.post("/v1/reward")
    @limited
    def reward_endpoint():
        body = _read_body(("persona", "utterances", "clamp_terms"))
        persona = _texts(body, "persona")
        utterances = _texts(body, "utterances")
        clamp = body.get("clamp_terms", False)
        if not isinstance(clamp, bool):
            raise ApiError(400, "malformed_field", "'clamp_terms' must be a boolean", field="clamp_terms")
        try:
            _, result = reward(persona, utterances, value_fn(), clamp_terms=clamp)
        except TermOverflowError as err:
            raise ApiError(422, "term_overflow", str(err), field="clamp_terms", turn=err.turn) from err
        return jsonify({"schema_version": SCHEMA_VERSION, **trace_to_dict(result, utterances)})

    @app.post("/v1/profile")
    @limited
    def profile():
        body = _read_body(("utterances", "aggregation"))
        utterances = _texts(body, "utterances")
        try:
            aggregation = Aggregation(body.get("aggregation", "mean"))
        except ValueError:
            raise ApiError(400, "malformed_field", "'aggregation' must be 'mean' or 'median'", "aggregation") from None
        result = profile_speaker(utterances, value_fn(), aggregation)
        return jsonify({"schema_version": SCHEMA_VERSION, **profile_to_dict(result)})

    return app


def load_app(config: ServeConfig) -> Flask:
    """Load the configured model and build the application around it."""
    if not config.model_path:
        raise RejectedInputError("No model file configured", field="model_path")
    checksum = sha256_file(config.model_path)
    model = ValueModel.load(config.model_path)
    logger.info("Loaded %s model %s (sha256 %s)", model.mode.value, config.model_path, checksum)
    return create_app(model, config, checksum)


def run(config: ServeConfig):
    """Serve until interrupted."""
    app = load_app(config)
    logger.info("Listening on %s:%d", config.host, config.port)
    app.run(host=config.host, port=config.port, threaded=True)


class RemoteScorer:
    """Value function backed by a running service.

    Args:
        url (str): Base URL of the service, e.g. http://127.0.0.1:8080.
        session: Object with a requests-compatible post() method. Defaults to a new requests.Session.
        timeout (float): Request timeout in seconds.
    """

    def __init__(self, url: str, session=None, timeout: float = 10.0):
        self.url = url.rstrip("/")
        self.session = session if session is not None else requests.Session()
        self.timeout = timeout

    def score(self, texts: Sequence[str]) -> list[ValueVector]:
        vectors = []
        for start in range(0, len(texts), MAX_TEXTS):
            chunk = list(texts[start : start + MAX_TEXTS])
            try:
                response = self.session.post(f"{self.url}/v1/score", json={"texts": chunk}, timeout=self.timeout)
                response.raise_for_status()
            except requests.RequestException as err:
                raise TransportError(f"Scoring request to {self.url} failed: {err}") from err
            try:
                rows = response.json()["vectors"]
                if len(rows) != len(chunk):
                    raise ValueError(f"expected {len(chunk)} vectors, got {len(rows)}")
                vectors.extend(ValueVector.parse(row) for row in rows)
            except (ValueError, KeyError, TypeError) as err:
                raise ResponseDecodeError(f"Malformed scoring response: {err}") from err
        return vectors

    def __call__(self, text: str) -> ValueVector:
        return self.score([text])[0]
