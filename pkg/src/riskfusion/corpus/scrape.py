"""Reddit collection over the public OAuth JSON API.

The HTTP layer is a pluggable *transport* (anything with ``request(method,
url, params=..., data=..., headers=..., auth=...)`` returning an object with
``status_code``, ``headers`` and ``json()``). :class:`ReplayTransport` serves
recorded transcripts so tests and ``ingest --replay`` run offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import product
from pathlib import Path
from typing import Callable, Iterator

from ..exceptions import CredentialError, RateLimitError, TransportError
from ..locking import FileLock
from .io import dumps_record
from .types import Post

log = logging.getLogger(__name__)

SORTS = ("top", "hot", "controversial", "new")
TIME_FILTERS = ("hour", "day", "week", "month", "year", "all")
ENV_VARS = ("REDDIT_CLIENT_ID", "REDDIT_CLIENT_SECRET", "REDDIT_USER_AGENT")

TOKEN_URL = "https://www.reddit.com/api/v1/access_token"
API_ROOT = "https://oauth.reddit.com"
WITH_COMMENTS_SUFFIX = ":with_comments"


@dataclass
class ScrapeConfig:
    subreddit: str = "SuicideWatch"
    store_dir: Path = Path("scrape_store")
    sorts: tuple[str, ...] = SORTS
    time_filters: tuple[str, ...] = TIME_FILTERS
    limit_per_listing: int = 1000
    page_size: int = 100
    max_retries: int = 5
    backoff_base: float = 1.0
    backoff_cap: float = 60.0

    def __post_init__(self):
        self.store_dir = Path(self.store_dir)
        bad = [s for s in self.sorts if s not in SORTS]
        if bad:
            raise ValueError(f"unknown sort strategy {bad[0]!r}")
        bad = [t for t in self.time_filters if t not in TIME_FILTERS]
        if bad:
            raise ValueError(f"unknown time filter {bad[0]!r}")
        if not self.subreddit:
            raise ValueError("subreddit must be named")


def credentials_from_env(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    for var in ENV_VARS:
        if not environ.get(var):
            raise CredentialError(f"missing environment variable {var}")
    return {
        "client_id": environ["REDDIT_CLIENT_ID"],
        "client_secret": environ["REDDIT_CLIENT_SECRET"],
        "user_agent": environ["REDDIT_USER_AGENT"],
    }


class RequestsTransport:
    def __init__(self, timeout: float = 30.0):
        import requests

        self._session = requests.Session()
        self._exc = requests.RequestException
        self.timeout = timeout

    def request(self, method, url, **kwargs):
        try:
            return self._session.request(method, url, timeout=self.timeout, **kwargs)
        except self._exc as exc:
            raise TransportError(f"{method} {url}: {exc}") from exc


class _ReplayResponse:
    def __init__(self, status_code, body, headers=None):
        self.status_code = status_code
        self._body = body
        self.headers = headers or {}

    def json(self):
        return self._body


class ReplayTransport:
    """Serve recorded request→response pairs.

    The fixture directory holds ``transcript.json``: a list of objects with
    ``method``, ``url``, optional ``params``, ``status`` and ``body``.
    Entries for the same request are served in recorded order; the last one
    repeats once exhausted. Unrecorded requests get an empty listing.
    """

    def __init__(self, directory):
        path = Path(directory) / "transcript.json"
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        self._queues: dict[tuple, list] = {}
        for e in entries:
            self._queues.setdefault(self._key(e["method"], e["url"], e.get("params")), []).append(e)
        self.calls: list[tuple] = []

    @staticmethod
    def _key(method, url, params):
        params = {k: str(v) for k, v in (params or {}).items() if k not in ("raw_json",)}
        return (method.upper(), url, tuple(sorted(params.items())))

    def request(self, method, url, params=None, **kwargs):
        key = self._key(method, url, params)
        self.calls.append(key)
        queue = self._queues.get(key)
        if not queue:
            if method.upper() == "POST":
                return _ReplayResponse(200, {"access_token": "replay", "expires_in": 3600})
            return _ReplayResponse(200, {"kind": "Listing", "data": {"children": [], "after": None}})
        entry = queue.pop(0) if len(queue) > 1 else queue[0]
        if entry.get("error") == "transport":
            raise TransportError(f"{method} {url}: recorded network failure")
        return _ReplayResponse(entry.get("status", 200), entry.get("body"), entry.get("headers"))


class RedditClient:
    def __init__(
        self,
        credentials: dict | None = None,
        transport=None,
        *,
        max_retries: int = 5,
        backoff_base: float = 1.0,
        backoff_cap: float = 60.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.credentials = credentials if credentials is not None else credentials_from_env()
        self.transport = transport if transport is not None else RequestsTransport()
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.backoff_cap = backoff_cap
        self.sleep = sleep
        self._token = None

    @property
    def _ua(self):
        return {"User-Agent": self.credentials.get("user_agent", "riskfusion")}

    def authenticate(self):
        resp = self._send(
            "POST",
            TOKEN_URL,
            data={"grant_type": "client_credentials"},
            auth=(self.credentials.get("client_id", ""), self.credentials.get("client_secret", "")),
            headers=self._ua,
        )
        token = (resp.json() or {}).get("access_token")
        if not token:
            raise CredentialError("token endpoint returned no access_token")
        self._token = token

    def _send(self, method, url, **kwargs):
        for attempt in range(self.max_retries + 1):
            resp = self.transport.request(method, url, **kwargs)
            if resp.status_code == 429:
                if attempt == self.max_retries:
                    break
                delay = self._retry_delay(resp, attempt)
                log.warning("rate limited on %s; retrying in %.1fs", url, delay)
                self.sleep(delay)
                continue
            if resp.status_code in (401, 403):
                raise CredentialError(f"{method} {url}: HTTP {resp.status_code}")
            if resp.status_code >= 400:
                raise TransportError(f"{method} {url}: HTTP {resp.status_code}")
            self._respect_budget(resp)
            return resp
        raise RateLimitError(f"{method} {url}: still rate limited after {self.max_retries} retries")

    def _retry_delay(self, resp, attempt):
        retry_after = (resp.headers or {}).get("Retry-After")
        if retry_after is not None:
            try:
                return min(float(retry_after), self.backoff_cap)
            except ValueError:
                pass
        return min(self.backoff_base * 2**attempt, self.backoff_cap)

    def _respect_budget(self, resp):
        headers = resp.headers or {}
        try:
            remaining = float(headers.get("x-ratelimit-remaining", "inf"))
            reset = float(headers.get("x-ratelimit-reset", 0))
        except ValueError:
            return
        if remaining < 1 and reset > 0:
            self.sleep(min(reset, self.backoff_cap))

    def get(self, path, params=None):
        if self._token is None:
            self.authenticate()
        headers = {**self._ua, "Authorization": f"bearer {self._token}"}
        return self._send("GET", API_ROOT + path, params=params, headers=headers).json()

    def listing(self, subreddit, sort, time_filter, limit=1000, page_size=100) -> Iterator[dict]:
        after, fetched = None, 0
        while fetched < limit:
            params = {"limit": min(page_size, limit - fetched), "t": time_filter}
            if after:
                params["after"] = after
            data = (self.get(f"/r/{subreddit}/{sort}", params) or {}).get("data") or {}
            children = data.get("children") or []
            for child in children:
                fetched += 1
                yield child.get("data", {})
            after = data.get("after")
            if not after or not children:
                return

    def comments(self, post_id) -> list[dict]:
        payload = self.get(f"/comments/{post_id}", {"limit": 500})
        if not isinstance(payload, list) or len(payload) < 2:
            return []
        out = []
        stack = list((payload[1].get("data") or {}).get("children") or [])
        while stack:
            node = stack.pop(0)
            if node.get("kind") != "t1":
                continue
            data = node.get("data") or {}
            out.append(data)
            replies = data.get("replies")
            if isinstance(replies, dict):
                stack.extend((replies.get("data") or {}).get("children") or [])
        return out


def pseudonymize(author: str) -> str:
    return hashlib.sha256(author.encode("utf-8")).hexdigest()[:16]


@dataclass
class Scraper:
    config: ScrapeConfig
    client: RedditClient
    out_path: Path | None = None
    cell_counts: dict = field(default_factory=dict)

    @property
    def ledger_path(self) -> Path:
        return self.config.store_dir / "seen_ids.txt"

    def _load_seen(self) -> set[str]:
        if not self.ledger_path.exists():
            return set()
        return {ln.strip() for ln in self.ledger_path.read_text(encoding="utf-8").splitlines() if ln.strip()}

    def run(self) -> list[Post]:
        cfg = self.config
        with FileLock(cfg.store_dir / "scrape.lock", "scrape store"):
            seen = self._load_seen()
            out = []
            if self.out_path is not None:
                Path(self.out_path).parent.mkdir(parents=True, exist_ok=True)
                Path(self.out_path).touch()
            with open(self.ledger_path, "a", encoding="utf-8") as ledger:
                for sort, tf in product(cfg.sorts, cfg.time_filters):
                    n_cell = 0
                    for sub in self.client.listing(cfg.subreddit, sort, tf, cfg.limit_per_listing, cfg.page_size):
                        rid = sub.get("id")
                        if not rid or rid in seen:
                            continue
                        posts = self._qualify(sub)
                        if posts:
                            self._emit(posts)
                            out.extend(posts)
                            n_cell += 1
                        seen.add(rid)
                        ledger.write(rid + "\n")
                        ledger.flush()
                    self.cell_counts[(sort, tf)] = n_cell
            return out

    def _qualify(self, sub: dict) -> list[Post]:
        author = sub.get("author")
        if not author or author == "[deleted]":
            return []
        own = [c.get("body", "") for c in self.client.comments(sub["id"]) if c.get("author") == author]
        own = [c for c in own if c and c not in ("[deleted]", "[removed]")]
        if not own:
            return []
        title, body = sub.get("title") or "", sub.get("selftext") or ""
        if not title and not body:
            return []
        ts = sub.get("created_utc")
        created = datetime.fromtimestamp(float(ts), tz=timezone.utc) if ts is not None else None
        common = dict(user_id=pseudonymize(author), title=title, body=body, created_utc=created, source="scraped")
        return [
            Post(id=sub["id"], representation="post_only", **common),
            Post(
                id=sub["id"] + WITH_COMMENTS_SUFFIX,
                representation="post_with_comments",
                author_comments=tuple(own),
                **common,
            ),
        ]

    def _emit(self, posts):
        if self.out_path is None:
            return
        with open(self.out_path, "a", encoding="utf-8", newline="\n") as fh:
            for p in posts:
                fh.write(dumps_record(p) + "\n")


def scrape_reddit(config: ScrapeConfig, client: RedditClient | None = None, out_path=None) -> list[Post]:
    """Collect qualifying posts across every sort x time-filter listing."""
    if client is None:
        client = RedditClient(
            max_retries=config.max_retries, backoff_base=config.backoff_base, backoff_cap=config.backoff_cap
        )
    return Scraper(config, client, out_path=out_path).run()
