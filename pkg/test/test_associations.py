# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock
import requests
from pyaxiology.common import ValueDimension
from pyaxiology.curation.associations import (
    AssociationClient,
    AssociationConfig,
    expand_lexicon_associations,
    fetch_associations,
)
from pyaxiology.curation.lexicon import Lexicon, LexiconEntry
from pyaxiology.errors import ResponseDecodeError, TransportError

FIXTURE = Path(__file__).parent / "fixtures" / "datamuse_tradition.json"


class FakeResponse:
    def __init__(self, text: str, status: int = 200):
        self.text = text
        self.status = status

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.HTTPError(f"{self.status} error")


class FakeSession:
    """Answers every query with the same body and counts calls."""

    def __init__(self, body: str = "[]", status: int = 200, error: Exception = None):
        self.body = body
        self.status = status
        self.error = error
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, params, timeout))
        if self.error is not None:
            raise self.error
        return FakeResponse(self.body, self.status)


class TestAssociationClient(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = AssociationConfig(cache_dir=self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_recorded_fixture(self):
        session = FakeSession(FIXTURE.read_text(encoding="utf-8"))
        words = fetch_associations("tradition", AssociationClient(self.config, session))
        self.assertIn("custom", words)
        self.assertEqual(len(set(words)), len(words))

    def test_cached_query_skips_network(self):
        session = FakeSession(FIXTURE.read_text(encoding="utf-8"))
        client = AssociationClient(self.config, session)
        first = client.query("means_like", "tradition")
        calls = len(session.calls)
        second = client.query("means_like", "tradition")
        self.assertEqual(first, second)
        self.assertEqual(calls, len(session.calls))

    def test_cache_keyed_by_endpoint_and_limit(self):
        session = FakeSession(FIXTURE.read_text(encoding="utf-8"))
        AssociationClient(self.config, session).query("means_like", "tradition")
        other_endpoint = AssociationConfig(endpoint="http://localhost:9/words", cache_dir=self.tmp.name)
        AssociationClient(other_endpoint, session).query("means_like", "tradition")
        smaller = AssociationConfig(max_results=5, cache_dir=self.tmp.name)
        AssociationClient(smaller, session).query("means_like", "tradition")
        self.assertEqual(3, len(session.calls))
        self.assertEqual(5, session.calls[2][1]["max"])

    def test_request_parameters(self):
        session = FakeSession()
        AssociationClient(self.config, session).query("triggered_by", "tradition")
        url, params, timeout = session.calls[0]
        self.assertEqual(self.config.endpoint, url)
        self.assertEqual("tradition", params["rel_trg"])
        self.assertEqual(5.0, timeout)

    def test_empty_response(self):
        client = AssociationClient(self.config, FakeSession("[]"))
        self.assertEqual([], fetch_associations("tradition", client))

    def test_malformed_response_not_cached(self):
        client = AssociationClient(self.config, FakeSession('{"word": "custom"}'))
        with self.assertRaises(ResponseDecodeError):
            client.query("means_like", "tradition")
        self.assertFalse(client.cache_path("means_like", "tradition").exists())

    def test_transport_error(self):
        client = AssociationClient(self.config, FakeSession(error=requests.ConnectionError("refused")))
        with self.assertRaises(TransportError):
            client.query("means_like", "tradition")
        client = AssociationClient(self.config, FakeSession(status=500))
        with self.assertRaises(TransportError):
            client.query("means_like", "tradition")

    def test_environment_overrides(self):
        env = {"PYAXIOLOGY_ENDPOINT": "http://localhost:9/words", "PYAXIOLOGY_CACHE_DIR": "/tmp/assoc"}
        with mock.patch.dict(os.environ, env):
            config = AssociationConfig().with_environment()
        self.assertEqual("http://localhost:9/words", config.endpoint)
        self.assertEqual("/tmp/assoc", config.cache_dir)


class TestExpandLexiconAssociations(unittest.TestCase):
    def test_fills_associated_tier(self):
        with tempfile.TemporaryDirectory() as tmp:
            session = FakeSession(FIXTURE.read_text(encoding="utf-8"))
            client = AssociationClient(AssociationConfig(cache_dir=tmp), session)
            lexicon = Lexicon({ValueDimension.TRADITION: LexiconEntry(definitional=frozenset({"tradition"}))})
            expanded = expand_lexicon_associations(lexicon, client)
        associated = expanded[ValueDimension.TRADITION].associated
        self.assertIn("custom", associated)
        self.assertNotIn("tradition", associated)
        self.assertNotIn("old custom", associated)


if __name__ == "__main__":
    unittest.main()
