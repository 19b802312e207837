"""Selecting checked properties that match a prose description, via an LLM.

The model sees a numbered list of English renderings and answers with
item numbers.  Numbers are mapped back locally, so anything the model
makes up (out-of-range numbers, free text) is detected exactly and dropped.
The same prompt is issued several times and the selections are unioned.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

from .props import Node
from .render import render_nl

log = logging.getLogger(__name__)

TOKEN_ENV = "SVAMINE_LLM_TOKEN"


class LlmError(RuntimeError):
    pass


class LlmClient(Protocol):
    def complete(self, prompt: str, params: Optional[dict] = None, run: int = 0) -> str:
        ...


# ---------------------------------------------------------------------------
# Prompt and response


PROMPT_HEAD = """\
You will compare a list of hardware protocol rules with a written description of the protocol.
Every rule in the list has already been confirmed against example waveforms, but only some of them are actually intended by the description.
Pick the rules that the description states or directly requires. Only pick from the list; do not write new rules or reword existing ones.
"""

PROMPT_FORMAT = """\
Reply with the numbers of the rules you pick, one number per line and nothing else.
If none of the rules apply, reply with the single word NONE.
"""


def build_prompt(items: Sequence[str], description: str) -> str:
    """Prompt listing ``items`` as 1-based numbered rules plus the description."""
    if not items:
        raise ValueError("cannot build a prompt for an empty property list")
    if not description.strip():
        raise ValueError("description is empty")
    listing = "\n".join(f"{i}. {text}" for i, text in enumerate(items, 1))
    return (f"{PROMPT_HEAD}\nRules:\n{listing}\n\nDescription:\n<<<\n{description.rstrip()}"
            f"\n>>>\n\n{PROMPT_FORMAT}")


def estimate_tokens(text: str) -> int:
    return (len(text) + 3) // 4


@dataclass
class ParsedResponse:
    indices: set = field(default_factory=set)  # 1-based
    hallucinations: list = field(default_factory=list)


_BULLET = re.compile(r"^\s*(?:[-*•]+\s*)")
_NUMBERED = re.compile(r"^(\d+)[.):]\s+\S")


def parse_response(text: str, count: int, items: Optional[Sequence[str]] = None
                   ) -> ParsedResponse:
    """Pull item numbers in ``1..count`` out of a model reply.

    Per line: an exact restatement of an item maps to that item; ``N. text``
    takes its leading number; otherwise every integer on the line is taken.
    Out-of-range numbers and lines with nothing usable are hallucinations.
    """
    by_text = {t: i for i, t in enumerate(items or (), 1)}
    out = ParsedResponse()
    for raw in text.splitlines():
        line = _BULLET.sub("", raw).strip()
        if not line or line.upper().strip(".") == "NONE":
            continue
        bare = line.strip("\"'`")
        if bare in by_text:
            out.indices.add(by_text[bare])
            continue
        m = _NUMBERED.match(line)
        numbers = [int(m.group(1))] if m else [int(tok) for tok in re.findall(r"\d+", line)]
        if not numbers:
            out.hallucinations.append(line)
            continue
        for n in numbers:
            if 1 <= n <= count:
                out.indices.add(n)
            else:
                out.hallucinations.append(n)
    if not out.indices and text.strip():
        log.warning("no usable selection in model reply")
    return out


# ---------------------------------------------------------------------------
# Extraction


@dataclass
class ExtractionResult:
    runs: list  # per run: sorted 1-based numbers into the checked list
    union: list  # sorted 1-based numbers
    hallucinations: list  # {"run", "block", "item"}
    transcripts: list  # {"run", "block", "prompt", "response", "error"}
    failed_runs: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def selected(self, checked: Sequence) -> list:
        return [checked[i - 1] for i in self.union]


def make_blocks(items: Sequence[str], description: str, block_size: int = 100,
                token_budget: Optional[int] = None) -> list[range]:
    """Split item positions into blocks that fit the size and token limits."""
    size = max(1, min(block_size, len(items)))
    while True:
        blocks = [range(k, min(k + size, len(items))) for k in range(0, len(items), size)]
        if token_budget is None or size == 1 or all(
                estimate_tokens(build_prompt([items[i] for i in b], description)) <= token_budget
                for b in blocks):
            return blocks
        size = max(1, size // 2)


def filter_properties(checked: Sequence[Union[Node, str]], description: str, client: LlmClient,
                      runs: int = 3, block_size: int = 100, token_budget: Optional[int] = None,
                      max_in_flight: int = 4, params: Optional[dict] = None) -> ExtractionResult:
    """Ask ``client`` ``runs`` times per block and union what it selects."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    params = dict(params or {})
    items = [c if isinstance(c, str) else render_nl(c) for c in checked]
    if not items:
        return ExtractionResult([[] for _ in range(runs)], [], [], [], [], params)
    blocks = make_blocks(items, description, block_size, token_budget)
    prompts = [build_prompt([items[i] for i in b], description) for b in blocks]
    jobs = [(r, b) for r in range(runs) for b in range(len(blocks))]

    def ask(job):
        r, b = job
        try:
            return client.complete(prompts[b], params, run=r), None
        except LlmError as exc:
            return None, str(exc)

    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        answers = list(pool.map(ask, jobs))

    per_run = [set() for _ in range(runs)]
    failed = set()
    halluc, transcripts = [], []
    for (r, b), (reply, error) in zip(jobs, answers):
        transcripts.append({"run": r, "block": b, "prompt": prompts[b], "response": reply,
                            "error": error})
        if reply is None:
            failed.add(r)
            log.warning("run %d block %d failed: %s", r, b, error)
            continue
        block = blocks[b]
        parsed = parse_response(reply, len(block), [items[i] for i in block])
        per_run[r].update(block[n - 1] + 1 for n in parsed.indices)
        for item in parsed.hallucinations:
            log.info("dropping hallucinated selection %r (run %d, block %d)", item, r, b)
            halluc.append({"run": r, "block": b, "item": item})
    if len(failed) == runs:
        raise LlmError(f"all {runs} runs failed")
    union = sorted(set().union(*per_run))
    return ExtractionResult([sorted(s) for s in per_run], union, halluc, transcripts,
                            sorted(failed), params)


# ---------------------------------------------------------------------------
# Clients


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class MockLlmClient:
    """Replays scripted replies.

    ``fixtures`` maps a prompt's sha256 hex digest (or ``"*"`` as a
    fallback) to a reply or to a list of replies indexed by run.  With a
    ``seed`` and no matching fixture, a reproducible random reply is made up
    instead, mixing valid-looking numbers, out-of-range ones and junk.
    """

    def __init__(self, fixtures: Optional[dict] = None, seed: Optional[int] = None):
        self.fixtures = dict(fixtures or {})
        self.seed = seed
        self.calls: list = []

    @classmethod
    def from_file(cls, path, seed: Optional[int] = None) -> "MockLlmClient":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data.get("responses", data) if isinstance(data, dict) else {}, seed)

    def complete(self, prompt: str, params: Optional[dict] = None, run: int = 0) -> str:
        key = prompt_hash(prompt)
        self.calls.append((key, run))
        reply = self.fixtures.get(key, self.fixtures.get("*"))
        if reply is None:
            if self.seed is None:
                raise LlmError(f"no fixture for prompt {key[:12]}")
            return self._fuzz(key, run)
        if isinstance(reply, list):
            if not reply:
                raise LlmError("empty fixture list")
            reply = reply[run % len(reply)]
        if reply is None:
            raise LlmError(f"scripted failure for run {run}")
        return reply

    def _fuzz(self, key: str, run: int) -> str:
        rng = random.Random(f"{self.seed}:{key}:{run}")
        lines = []
        for _ in range(rng.randint(0, 8)):
            pick = rng.random()
            if pick < 0.6:
                lines.append(str(rng.randint(0, 120)))
            elif pick < 0.8:
                lines.append(f"{rng.randint(1, 40)}. some rule")
            else:
                lines.append(rng.choice(["I think these apply:", "foo", "All of them", "-1"]))
        return "\n".join(lines)


class HttpChatClient:
    """Chat-completion client over HTTP JSON.

    Posts ``{"model", "messages", **params}`` to ``endpoint`` and reads
    ``choices[0].message.content``.  The bearer token is read from the
    environment variable named by ``token_env``.
    """

    def __init__(self, endpoint: str, model: str, token_env: str = TOKEN_ENV,
                 timeout: float = 300.0, retries: int = 3, backoff: float = 2.0,
                 params: Optional[dict] = None):
        self.endpoint = endpoint
        self.model = model
        self.token_env = token_env
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.params = dict(params or {})

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str, params: Optional[dict] = None, run: int = 0) -> str:
        import httpx

        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}]}
        body.update(self.params)
        body.update(params or {})
        last = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = httpx.post(self.endpoint, json=body, headers=self._headers(),
                                  timeout=self.timeout)
            except httpx.HTTPError as exc:
                last = f"transport error: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise LlmError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise LlmError(f"malformed chat response: {exc}") from exc
        raise LlmError(f"request failed after {self.retries + 1} attempts ({last})")
