"""Translation clients used for back-translation.

All clients expose ``translate(text, source, target) -> str`` and raise
:class:`~riskfusion.exceptions.TransportError` on failure.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from ..exceptions import CredentialError, TransportError


class IdentityTranslator:
    def translate(self, text, source, target):
        return text


class ReplayTranslator:
    """Serve recorded translations from ``*.json`` transcripts in a directory.

    Each file holds a list of ``{"text", "source", "target", "translation"}``
    objects. An entry may instead carry ``"error": "timeout"`` to replay a
    failure.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self._table = {}
        files = sorted(self.directory.glob("*.json"))
        if not files:
            raise FileNotFoundError(f"no translation transcripts in {self.directory}")
        for f in files:
            for e in json.loads(f.read_text(encoding="utf-8")):
                self._table[(e["text"], e["source"], e["target"])] = e

    def translate(self, text, source, target):
        e = self._table.get((text, source, target))
        if e is None:
            raise TransportError(f"no recorded translation {source}->{target} for {text[:40]!r}")
        if e.get("error"):
            raise TransportError(f"recorded failure: {e['error']}")
        return e["translation"]


class HttpTranslator:
    """JSON-over-HTTP client for LibreTranslate/Google-v2 style endpoints.

    Requests are serialised through a lock and spaced by ``min_interval``
    seconds to stay inside external rate limits.
    """

    def __init__(self, endpoint, api_key=None, timeout=30.0, min_interval=0.0, session=None):
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get("TRANSLATE_API_KEY")
        if not self.api_key:
            raise CredentialError("missing environment variable TRANSLATE_API_KEY")
        self.timeout = timeout
        self.min_interval = min_interval
        self._lock = threading.Lock()
        self._last = 0.0
        if session is None:
            import requests

            session = requests.Session()
        self._session = session

    def translate(self, text, source, target):
        import requests

        payload = {"q": text, "source": source, "target": target, "format": "text", "api_key": self.api_key}
        with self._lock:
            wait = self.min_interval - (time.monotonic() - self._last)
            if wait > 0:
                time.sleep(wait)
            try:
                resp = self._session.post(self.endpoint, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                raise TransportError(f"translation request failed: {exc}") from exc
            finally:
                self._last = time.monotonic()
        if resp.status_code != 200:
            raise TransportError(f"translation endpoint returned HTTP {resp.status_code}")
        body = resp.json()
        if "translatedText" in body:
            return body["translatedText"]
        try:
            return body["data"]["translations"][0]["translatedText"]
        except (KeyError, IndexError, TypeError):
            raise TransportError("unrecognised translation response") from None
