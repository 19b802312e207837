import json

import httpx
import pytest

from svamine.llm import (HttpChatClient, LlmError, MockLlmClient, build_prompt,
                         estimate_tokens, filter_properties, make_blocks, parse_response,
                         prompt_hash)

ITEMS = [f"If A{i} is HIGH, then B{i} is LOW." for i in range(1, 6)]
TEXT = "A short protocol description."


def test_prompt_layout():
    p = build_prompt(ITEMS[:2], TEXT)
    assert "1. If A1 is HIGH, then B1 is LOW.\n2. If A2 is HIGH" in p
    assert "<<<\nA short protocol description.\n>>>" in p
    assert p == build_prompt(ITEMS[:2], TEXT + "\n\n")
    assert prompt_hash(p) == prompt_hash(build_prompt(list(ITEMS[:2]), TEXT))
    with pytest.raises(ValueError):
        build_prompt([], TEXT)
    with pytest.raises(ValueError):
        build_prompt(ITEMS, "  ")


@pytest.mark.parametrize("reply, indices, junk", [
    ("I select: 1, 3", {1, 3}, []),
    ("3\n99\nfoo", {3}, [99, "foo"]),
    ("- 2\n* 4\n", {2, 4}, []),
    ("2. If A2 is HIGH, then B2 is LOW.", {2}, []),
    ("4. some other rule 17", {4}, []),
    ("If A5 is HIGH, then B5 is LOW.", {5}, []),
    ('"If A1 is HIGH, then B1 is LOW."', {1}, []),
    ("If A one is HIGH then B is LOW", set(), ["If A one is HIGH then B is LOW"]),
    ("NONE", set(), []),
    ("0\n6", set(), [0, 6]),
    ("", set(), []),
])
def test_parse_response(reply, indices, junk):
    got = parse_response(reply, 5, ITEMS)
    assert got.indices == indices
    assert got.hallucinations == junk


def test_near_miss_restatement_is_not_matched_as_text():
    # not an exact restatement, so only the integers on the line count
    got = parse_response("If A three is HIGH, then B3 is LOW.", 5, ITEMS)
    assert got.indices == {3}
    got = parse_response("If Athree is HIGH, then Bthree is LOW.", 5, ITEMS)
    assert got.indices == set() and len(got.hallucinations) == 1


def test_union_over_runs():
    client = MockLlmClient({"*": ["1\n3", "3\n5", "3"]})
    res = filter_properties(ITEMS, TEXT, client, runs=3)
    assert res.runs == [[1, 3], [3, 5], [3]]
    assert res.union == [1, 3, 5]
    assert res.selected(ITEMS) == [ITEMS[0], ITEMS[2], ITEMS[4]]
    assert res.hallucinations == []
    assert len(res.transcripts) == 3


def test_hallucinations_dropped():
    res = filter_properties(ITEMS, TEXT, MockLlmClient({"*": "2\n99"}), runs=1)
    assert res.union == [2]
    assert res.hallucinations == [{"run": 0, "block": 0, "item": 99}]


def test_failed_runs():
    res = filter_properties(ITEMS, TEXT, MockLlmClient({"*": ["1", None, "2"]}), runs=3)
    assert res.union == [1, 2]
    assert res.failed_runs == [1]
    assert res.transcripts[1]["error"]
    with pytest.raises(LlmError, match="all 2 runs failed"):
        filter_properties(ITEMS, TEXT, MockLlmClient(), runs=2)


def test_fixture_keyed_by_prompt_hash():
    key = prompt_hash(build_prompt(ITEMS, TEXT))
    client = MockLlmClient({key: "4", "*": "1"})
    assert filter_properties(ITEMS, TEXT, client, runs=1).union == [4]
    assert filter_properties(ITEMS[:3], TEXT, client, runs=1).union == [1]


def test_from_file(tmp_path):
    path = tmp_path / "mock.json"
    path.write_text(json.dumps({"responses": {"*": "2"}}))
    assert MockLlmClient.from_file(path).complete("anything") == "2"
    path.write_text(json.dumps({"*": ["1", "3"]}))
    assert MockLlmClient.from_file(path).complete("x", run=1) == "3"


def test_blocks_and_index_mapping():
    items = [f"rule number {i}" for i in range(218)]
    blocks = make_blocks(items, TEXT, block_size=100)
    assert [len(b) for b in blocks] == [100, 100, 18]
    # "1" in each block selects that block's first item
    client = MockLlmClient({"*": "1"})
    res = filter_properties(items, TEXT, client, runs=1)
    assert res.union == [1, 101, 201]
    tight = make_blocks(items, TEXT, block_size=100, token_budget=400)
    assert all(estimate_tokens(build_prompt([items[i] for i in b], TEXT)) <= 400 for b in tight)
    assert sum(len(b) for b in tight) == 218 and len(tight) > 3


def test_fuzzed_replies_never_escape_the_list():
    for seed in range(40):
        res = filter_properties(ITEMS, TEXT, MockLlmClient(seed=seed), runs=3)
        assert set(res.union) <= set(range(1, 6))
        again = filter_properties(ITEMS, TEXT, MockLlmClient(seed=seed), runs=3)
        assert again.union == res.union and again.hallucinations == res.hallucinations


def test_empty_checked_list():
    res = filter_properties([], TEXT, MockLlmClient(), runs=2)
    assert res.union == [] and res.transcripts == []


class _Resp:
    def __init__(self, status, payload=None, text=""):
        self.status_code = status
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError("no json")
        return self._payload


def _ok(content):
    return _Resp(200, {"choices": [{"message": {"content": content}}]})


def test_http_client_request_and_retry(monkeypatch):
    calls = []
    replies = [_Resp(503), httpx.ConnectError("down"), _ok("1\n2")]

    def fake_post(url, json, headers, timeout):
        calls.append((url, json, headers))
        r = replies.pop(0)
        if isinstance(r, Exception):
            raise r
        return r

    monkeypatch.setattr(httpx, "post", fake_post)
    monkeypatch.setenv("SVAMINE_LLM_TOKEN", "secret")
    client = HttpChatClient("http://llm.example/v1/chat", "m1", backoff=0,
                            params={"temperature": 0})
    assert client.complete("hello", {"top_p": 0.5}) == "1\n2"
    assert len(calls) == 3
    url, body, headers = calls[0]
    assert body == {"model": "m1", "messages": [{"role": "user", "content": "hello"}],
                    "temperature": 0, "top_p": 0.5}
    assert headers["Authorization"] == "Bearer secret"


def test_http_client_errors(monkeypatch):
    monkeypatch.setattr(httpx, "post", lambda *a, **k: _Resp(401, text="nope"))
    with pytest.raises(LlmError, match="401"):
        HttpChatClient("http://x", "m", backoff=0).complete("p")
    monkeypatch.setattr(httpx, "post", lambda *a, **k: _Resp(500))
    with pytest.raises(LlmError, match="3 attempts"):
        HttpChatClient("http://x", "m", retries=2, backoff=0).complete("p")
    monkeypatch.setattr(httpx, "post", lambda *a, **k: _Resp(200, {"bad": 1}))
    with pytest.raises(LlmError, match="malformed"):
        HttpChatClient("http://x", "m", backoff=0).complete("p")
