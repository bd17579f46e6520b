"""Client for a word association service with a Datamuse-style query API."""
from __future__ import annotations
import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
import requests
from ..abstract import Serializable
from ..common import ValueDimension
from ..errors import ResponseDecodeError, TransportError
from ..util import atomic_write_text
from .lexicon import Lexicon, Tier

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.datamuse.com/words"

# Query parameter per relation kind: similar meaning, adjectives used to describe the word, and words triggered by it.
RELATIONS = {
    "means_like": "ml",
    "described_by": "rel_jjb",
    "triggered_by": "rel_trg",
}


@dataclass
class AssociationConfig(Serializable):
    """Association client settings.

    Args:
        endpoint (str): Base URL of the word association service.
        timeout (float): Request timeout in seconds. Default: 5.
        cache_dir (str): Directory for cached response bodies.
        max_results (int): Maximum words requested per relation.
    """

    endpoint: str = DEFAULT_ENDPOINT
    timeout: float = 5.0
    cache_dir: str = ".pyaxiology-cache/associations"
    max_results: int = 50

    def with_environment(self) -> AssociationConfig:
        """Returns a copy with PYAXIOLOGY_ENDPOINT and PYAXIOLOGY_CACHE_DIR applied."""
        return AssociationConfig(
            endpoint=os.environ.get("PYAXIOLOGY_ENDPOINT", self.endpoint),
            timeout=self.timeout,
            cache_dir=os.environ.get("PYAXIOLOGY_CACHE_DIR", self.cache_dir),
            max_results=self.max_results,
        )


class AssociationClient:
    """Fetches associated words, caching every response body on disk.

    Only one thread writes to the cache at a time; reads are unsynchronized.

    Args:
        config (AssociationConfig): Endpoint, timeout and cache location.
        session: Object with a requests-compatible get() method. Defaults to a new requests.Session.
    """

    def __init__(self, config: AssociationConfig = None, session=None):
        self.config = config or AssociationConfig()
        self.session = session if session is not None else requests.Session()
        self._write_lock = threading.Lock()

    def cache_path(self, relation: str, word: str) -> Path:
        """Cache file of one query. The key covers the endpoint and result limit as well as the query."""
        key = "\0".join((self.config.endpoint, str(self.config.max_results), relation, word))
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return Path(self.config.cache_dir) / f"{digest}.json"

    def query(self, relation: str, word: str) -> list[str]:
        """Return the words the service associates with word under one relation kind."""
        path = self.cache_path(relation, word)
        if path.exists():
            logger.debug("Cache hit for %s(%s)", relation, word)
            return _decode(path.read_text(encoding="utf-8"))
        logger.debug("Cache miss for %s(%s)", relation, word)
        params = {RELATIONS[relation]: word, "max": self.config.max_results}
        try:
            response = self.session.get(self.config.endpoint, params=params, timeout=self.config.timeout)
            response.raise_for_status()
        except requests.RequestException as err:
            raise TransportError(f"Association request for {relation}({word}) failed: {err}") from err
        body = response.text
        words = _decode(body)
        with self._write_lock:
            atomic_write_text(path, body)
        return words

    def fetch(self, word: str) -> list[str]:
        """Return associated words over all relation kinds, lowercased and deduplicated in first-seen order."""
        seen = {}
        for relation in RELATIONS:
            for w in self.query(relation, word):
                seen.setdefault(w.lower(), None)
        return list(seen)


def _decode(body: str) -> list[str]:
    try:
        records = json.loads(body)
    except json.JSONDecodeError as err:
        raise ResponseDecodeError(f"Response is not JSON: {err.msg}") from err
    if not isinstance(records, list):
        raise ResponseDecodeError("Response is not a list")
    words = []
    for record in records:
        if not isinstance(record, dict) or not isinstance(record.get("word"), str):
            raise ResponseDecodeError(f"Malformed word record: {record!r}")
        words.append(record["word"].strip())
    return [w for w in words if w]


def fetch_associations(word: str, client: AssociationClient) -> list[str]:
    """Return words associated with word. See AssociationClient.fetch()."""
    return client.fetch(word)


def expand_lexicon_associations(lexicon: Lexicon, client: AssociationClient) -> Lexicon:
    """Fill the associated tier with service associations of every definitional keyword.

    Multi-word associations are skipped since scenario matching works on single tokens.
    """
    for dim in ValueDimension.ordered():
        for keyword in sorted(lexicon[dim].definitional):
            words = [w for w in fetch_associations(keyword, client) if " " not in w and "-" not in w]
            lexicon = lexicon.with_words(dim, Tier.ASSOCIATED, words)
    return lexicon
