import json

import pytest

from riskfusion.corpus import RedditClient, ReplayTransport, ScrapeConfig, scrape_reddit
from riskfusion.corpus.scrape import credentials_from_env, pseudonymize
from riskfusion.exceptions import CredentialError, LockError, RateLimitError, TransportError

CREDS = {"client_id": "id", "client_secret": "s", "user_agent": "test"}


class Sleeps(list):
    def __call__(self, s):
        self.append(s)


def _client(directory, sleep=None, **kw):
    return RedditClient(CREDS, ReplayTransport(directory), sleep=Sleeps() if sleep is None else sleep, **kw)


def _scrape(tmp_path, fixtures, **kw):
    cfg = ScrapeConfig(store_dir=tmp_path / "store", **kw)
    client = _client(fixtures / "reddit")
    return scrape_reddit(cfg, client, out_path=tmp_path / "out.jsonl"), client


def test_replay_fixture(tmp_path, fixtures):
    posts, client = _scrape(tmp_path, fixtures)
    ids = [p.id for p in posts]
    assert ids == ["p1", "p1:with_comments", "p2", "p2:with_comments", "p5", "p5:with_comments"]
    p1 = posts[1]
    assert p1.representation == "post_with_comments"
    # only the original poster's comments, nested replies included
    assert all("erin" not in c for c in p1.author_comments)
    assert len(p1.author_comments) == 2
    assert p1.user_id == pseudonymize("alice") and "alice" not in p1.user_id
    assert posts[0].representation == "post_only"
    lines = (tmp_path / "out.jsonl").read_text().splitlines()
    assert len(lines) == 6


def test_dedup_and_no_duplicate_pairs(tmp_path, fixtures):
    posts, _ = _scrape(tmp_path, fixtures)
    pairs = [(p.id, p.representation) for p in posts]
    assert len(pairs) == len(set(pairs))
    assert sum(p.id == "p1" for p in posts) == 1


def test_ledger_makes_rerun_resume(tmp_path, fixtures):
    _scrape(tmp_path, fixtures)
    seen = (tmp_path / "store" / "seen_ids.txt").read_text().split()
    assert set(seen) == {"p1", "p2", "p3", "p4", "p5"}
    again, _ = _scrape(tmp_path, fixtures)
    assert again == []


def test_cross_product_visited(tmp_path, fixtures):
    cfg = ScrapeConfig(store_dir=tmp_path / "s")
    client = _client(fixtures / "reddit")
    from riskfusion.corpus import Scraper

    sc = Scraper(cfg, client)
    sc.run()
    assert len(sc.cell_counts) == 4 * 6
    assert sc.cell_counts[("top", "hour")] == 2 and sc.cell_counts[("hot", "hour")] == 1
    listing_urls = {c[1] for c in client.transport.calls if c[0] == "GET" and "/r/" in c[1]}
    assert len(listing_urls) == 4


def test_rate_limit_backoff_uses_retry_after(tmp_path, fixtures):
    sleeps = Sleeps()
    client = _client(fixtures / "reddit", sleep=sleeps)
    scrape_reddit(ScrapeConfig(store_dir=tmp_path / "s"), client)
    assert 2.0 in sleeps


def _write(tmp_path, entries):
    d = tmp_path / "t"
    d.mkdir()
    (d / "transcript.json").write_text(json.dumps(entries))
    return d


def _listing_429(n):
    return [
        {"method": "GET", "url": "https://oauth.reddit.com/r/SuicideWatch/top",
         "params": {"limit": 100, "t": "hour"}, "status": 429, "body": None}
    ] * n


def test_rate_limit_error_after_bounded_attempts(tmp_path):
    sleeps = Sleeps()
    client = _client(_write(tmp_path, _listing_429(10)), sleep=sleeps, max_retries=3, backoff_base=0.5)
    with pytest.raises(RateLimitError):
        scrape_reddit(ScrapeConfig(store_dir=tmp_path / "s", sorts=("top",), time_filters=("hour",)), client)
    assert sleeps == [0.5, 1.0, 2.0]


def test_backoff_capped(tmp_path):
    sleeps = Sleeps()
    client = _client(_write(tmp_path, _listing_429(10)), sleep=sleeps, max_retries=4, backoff_base=10, backoff_cap=15)
    with pytest.raises(RateLimitError):
        client.get("/r/SuicideWatch/top", {"limit": 100, "t": "hour"})
    assert sleeps == [10, 15, 15, 15]


def test_auth_failure(tmp_path):
    d = _write(tmp_path, [{"method": "POST", "url": "https://www.reddit.com/api/v1/access_token", "status": 401}])
    with pytest.raises(CredentialError):
        scrape_reddit(ScrapeConfig(store_dir=tmp_path / "s"), _client(d))


def test_network_failure(tmp_path):
    d = _write(tmp_path, [{"method": "GET", "url": "https://oauth.reddit.com/r/SuicideWatch/top",
                           "params": {"limit": 100, "t": "hour"}, "error": "transport"}])
    with pytest.raises(TransportError):
        scrape_reddit(ScrapeConfig(store_dir=tmp_path / "s"), _client(d))


def test_no_qualifying_posts(tmp_path):
    d = _write(tmp_path, [])
    assert scrape_reddit(ScrapeConfig(store_dir=tmp_path / "s"), _client(d)) == []


def test_missing_credentials():
    with pytest.raises(CredentialError, match="REDDIT_CLIENT_SECRET"):
        credentials_from_env({"REDDIT_CLIENT_ID": "x"})
    assert credentials_from_env(
        {"REDDIT_CLIENT_ID": "a", "REDDIT_CLIENT_SECRET": "b", "REDDIT_USER_AGENT": "c"}
    )["user_agent"] == "c"


def test_store_lock(tmp_path, fixtures):
    store = tmp_path / "store"
    store.mkdir()
    (store / "scrape.lock").write_text("123")
    with pytest.raises(LockError):
        _scrape(tmp_path, fixtures)


def test_config_validation():
    with pytest.raises(ValueError):
        ScrapeConfig(sorts=("rising",))
    with pytest.raises(ValueError):
        ScrapeConfig(time_filters=("decade",))
