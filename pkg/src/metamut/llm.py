"""Model gateway: HTTP chat-completion backends plus a scripted mock.

Every raw response is persisted in a content-addressed cache keyed by
SHA-256 over (model name, full prompt, decoding parameters), so a warm
cache replays an entire run byte-identically with no network access.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import requests

from metamut.ingest import TaskType
from metamut.prompts import Prompt
from metamut.values import NotALiteral, parse_literal


class ExtractionKind(enum.Enum):
    CODE = "code"
    LITERAL = "literal"
    BOOLEAN = "boolean"
    OPTION_LETTER = "option_letter"
    INVALID = "invalid"


@dataclass(frozen=True)
class Extracted:
    kind: ExtractionKind
    value: str | None = None

    @property
    def is_invalid(self) -> bool:
        return self.kind is ExtractionKind.INVALID


INVALID = Extracted(ExtractionKind.INVALID)


@dataclass
class ModelSpec:
    name: str
    backend: str = "mock"  # mock | http_openai_style
    endpoint: str | None = None
    credential_env: str | None = None
    temperature: float = 0.0
    max_tokens: int = 1024
    reasoning_effort: str | None = None
    timeout_s: float = 60.0
    max_attempts: int = 3
    backoff_s: float = 2.0
    script_path: str | None = None  # mock backend only

    def decoding_params(self) -> dict[str, Any]:
        params: dict[str, Any] = {
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        if self.reasoning_effort is not None:
            params["reasoning_effort"] = self.reasoning_effort
        return params


@dataclass
class ModelAnswer:
    raw_text: str
    extracted: Extracted
    confidence: float | None = None
    latency_ms: int = 0
    attempt_count: int = 1
    note: str | None = None


class AuthError(RuntimeError):
    """Credentials missing or rejected; not retryable."""


class NetworkError(RuntimeError):
    """Transport failure after exhausting retries."""


def confidence_from_probs(probs: Sequence[float]) -> float | None:
    """Geometric mean of per-token probabilities."""
    if not probs:
        return None
    if any(p <= 0 for p in probs):
        return 0.0
    return math.exp(sum(math.log(p) for p in probs) / len(probs))


# --------------------------------------------------------------------------
# Answer extraction
# --------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```(?:[A-Za-z0-9_+-]*)\n(.*?)```", re.DOTALL)


def _fenced_blocks(text: str) -> list[str]:
    return [m.group(1) for m in _FENCE_RE.finditer(text)]


def _longest_function_region(text: str) -> str | None:
    import ast as _ast

    lines = text.splitlines()
    best: str | None = None
    for start, line in enumerate(lines):
        if not line.lstrip().startswith(("def ", "async def ", "import ", "from ")):
            continue
        for end in range(len(lines), start, -1):
            candidate = "\n".join(lines[start:end])
            try:
                tree = _ast.parse(candidate)
            except SyntaxError:
                continue
            if any(
                isinstance(n, (_ast.FunctionDef, _ast.AsyncFunctionDef)) for n in tree.body
            ):
                if best is None or len(candidate) > len(best):
                    best = candidate
            break
    return best


def _extract_code(text: str) -> Extracted:
    import ast as _ast

    for block in _fenced_blocks(text):
        try:
            tree = _ast.parse(block)
        except SyntaxError:
            continue
        if any(
            isinstance(n, (_ast.FunctionDef, _ast.AsyncFunctionDef)) for n in tree.body
        ):
            return Extracted(ExtractionKind.CODE, block.strip() + "\n")
    region = _longest_function_region(text)
    if region is not None:
        return Extracted(ExtractionKind.CODE, region.strip() + "\n")
    return INVALID


def _extract_option(text: str) -> Extracted:
    match = re.search(r"\b([ABCDabcd])\b", text)
    if match:
        return Extracted(ExtractionKind.OPTION_LETTER, match.group(1).upper())
    return INVALID


def _extract_boolean(text: str) -> Extracted:
    match = re.search(r"\b(true|false)\b", text, re.IGNORECASE)
    if match:
        return Extracted(ExtractionKind.BOOLEAN, match.group(1).capitalize())
    return INVALID


def _extract_literal(text: str) -> Extracted:
    candidates: list[str] = []
    candidates.extend(_fenced_blocks(text))
    stripped = text.strip()
    if stripped:
        candidates.append(stripped)
        lines = [ln.strip() for ln in stripped.splitlines() if ln.strip()]
        if lines:
            candidates.append(lines[-1])
            candidates.append(lines[0])
    for candidate in candidates:
        try:
            value = parse_literal(candidate)
        except NotALiteral:
            continue
        return Extracted(ExtractionKind.LITERAL, repr(value))
    return INVALID


def extract_answer(raw: str, task_type: TaskType) -> Extracted:
    """Pull the structured answer out of raw model text; total, never raises."""
    if not raw or not raw.strip():
        return INVALID
    if task_type is TaskType.CODE_GENERATION:
        return _extract_code(raw)
    if task_type is TaskType.MCQ:
        return _extract_option(raw)
    if task_type is TaskType.INPUT_PREDICTION:
        return _extract_boolean(raw)
    return _extract_literal(raw)


# --------------------------------------------------------------------------
# Backends
# --------------------------------------------------------------------------


@dataclass
class RawResponse:
    text: str
    confidence: float | None = None
    token_probs: list[float] | None = None
    delay_ms: int = 0


class MockBackend:
    """Deterministic backend scripted per (task_id, variant).

    The script is JSONL of {task_id, variant, response, confidence?,
    delay_ms?}.  Unknown (task_id, variant) keys yield an empty
    response, which extraction maps to Invalid.
    """

    def __init__(self, script: dict[tuple[str, str], dict[str, Any]]) -> None:
        self.script = script
        self.request_count = 0

    @classmethod
    def from_script(cls, path: str | Path) -> "MockBackend":
        script: dict[tuple[str, str], dict[str, Any]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            script[(str(record["task_id"]), str(record["variant"]))] = record
        return cls(script)

    def complete(
        self, model: ModelSpec, prompt: Prompt, task_id: str, variant: str
    ) -> RawResponse:
        self.request_count += 1
        record = self.script.get((task_id, variant), {})
        return RawResponse(
            text=str(record.get("response", "")),
            confidence=record.get("confidence"),
            delay_ms=int(record.get("delay_ms", 0)),
        )


class HttpOpenAIStyleBackend:
    """Chat-completions backend speaking the common JSON dialect."""

    def __init__(self, session: requests.Session | None = None) -> None:
        self.session = session or requests.Session()
        self.request_count = 0

    def complete(
        self, model: ModelSpec, prompt: Prompt, task_id: str, variant: str
    ) -> RawResponse:
        if not model.endpoint:
            raise AuthError(f"model {model.name} has no endpoint configured")
        headers = {"Content-Type": "application/json"}
        if model.credential_env:
            key = os.environ.get(model.credential_env)
            if not key:
                raise AuthError(f"credential env var {model.credential_env} not set")
            headers["Authorization"] = f"Bearer {key}"
        payload: dict[str, Any] = {
            "model": model.name,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "logprobs": True,
            **model.decoding_params(),
        }
        last_error: Exception | None = None
        for attempt in range(model.max_attempts):
            if attempt:
                time.sleep(model.backoff_s * (2 ** (attempt - 1)))
            try:
                self.request_count += 1
                response = self.session.post(
                    model.endpoint, json=payload, headers=headers, timeout=model.timeout_s
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"auth rejected ({response.status_code})")
            if response.status_code >= 500 or response.status_code == 429:
                last_error = RuntimeError(f"server error {response.status_code}")
                continue
            response.raise_for_status()
            body = response.json()
            choice = body["choices"][0]
            text = choice["message"]["content"] or ""
            probs: list[float] | None = None
            logprobs = (choice.get("logprobs") or {}).get("content")
            if logprobs:
                probs = [math.exp(t["logprob"]) for t in logprobs if "logprob" in t]
            return RawResponse(text=text, token_probs=probs)
        raise NetworkError(str(last_error))


def make_backend(model: ModelSpec):
    if model.backend == "mock":
        if not model.script_path:
            return MockBackend({})
        return MockBackend.from_script(model.script_path)
    if model.backend == "http_openai_style":
        return HttpOpenAIStyleBackend()
    raise ValueError(f"unknown backend: {model.backend!r}")


# --------------------------------------------------------------------------
# Cache + query
# --------------------------------------------------------------------------


def cache_key(model: ModelSpec, prompt: Prompt) -> str:
    payload = json.dumps(
        {
            "model": model.name,
            "system": prompt.system,
            "user": prompt.user,
            "params": model.decoding_params(),
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """Content-addressed JSON cache, safe under concurrent writers."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict[str, Any] | None:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, record: dict[str, Any]) -> None:
        path = self._path(key)
        tmp = path.with_suffix(f".tmp.{os.getpid()}")
        tmp.write_text(
            json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        os.replace(tmp, path)


@dataclass
class Gateway:
    """Bundles a model spec, its backend, and an optional cache."""

    model: ModelSpec
    backend: Any = None
    cache: ResponseCache | None = None
    request_count: int = field(default=0)

    def __post_init__(self) -> None:
        if self.backend is None:
            self.backend = make_backend(self.model)

    def query(
        self,
        prompt: Prompt,
        task_type: TaskType,
        task_id: str = "",
        variant: str = "original",
    ) -> ModelAnswer:
        key = cache_key(self.model, prompt)
        cached = self.cache.get(key) if self.cache else None
        if cached is not None:
            raw = cached["raw_text"]
            confidence = cached.get("confidence")
            latency_ms = int(cached.get("latency_ms", 0))
        else:
            start = time.monotonic()
            try:
                response = self.backend.complete(self.model, prompt, task_id, variant)
            except NetworkError as exc:
                return ModelAnswer(
                    raw_text="",
                    extracted=INVALID,
                    attempt_count=self.model.max_attempts,
                    note=f"network error: {exc}",
                )
            self.request_count += 1
            if response.delay_ms and response.delay_ms > self.model.timeout_s * 1000:
                return ModelAnswer(
                    raw_text="",
                    extracted=INVALID,
                    latency_ms=response.delay_ms,
                    note="timeout",
                )
            raw = response.text
            confidence = response.confidence
            if confidence is None and response.token_probs is not None:
                confidence = confidence_from_probs(response.token_probs)
            latency_ms = response.delay_ms or int((time.monotonic() - start) * 1000)
            if self.cache:
                self.cache.put(
                    key,
                    {
                        "raw_text": raw,
                        "confidence": confidence,
                        "latency_ms": latency_ms,
                        "model": self.model.name,
                        "task_id": task_id,
                        "variant": variant,
                    },
                )
        return ModelAnswer(
            raw_text=raw,
            extracted=extract_answer(raw, task_type),
            confidence=confidence,
            latency_ms=latency_ms,
        )
