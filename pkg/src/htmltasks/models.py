"""Text-in/text-out model boundary: mocks for tests and an HTTP client for served models."""

from __future__ import annotations

import logging
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import requests

from .codec import (
    Action,
    ActionParseError,
    decode_navigation_input,
    encode_action,
    navigation_head_length,
)
from .dom import parse_html

log = logging.getLogger(__name__)

API_KEY_ENV = "HTMLTASKS_API_KEY"


class ModelError(Exception):
    pass


class Timeout(ModelError):
    pass


class TransportError(ModelError):
    pass


class RemoteError(ModelError):
    def __init__(self, status: int, body: str):
        super().__init__(f"remote returned {status}: {body[:200]}")
        self.status = status
        self.body = body


@dataclass(frozen=True)
class ModelRequest:
    input: str
    max_output_tokens: int = 64
    # 0 means greedy decoding
    temperature: float = 0.0
    # leading characters that truncation must keep (history and instruction)
    protected_prefix: int = 0

    def __post_init__(self):
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class ModelResponse:
    output: str
    truncated: bool = False


def truncate_input(text: str, max_chars: Optional[int], protected_prefix: int = 0) -> tuple[str, bool]:
    """Cut characters from the end, never inside the first ``protected_prefix`` characters."""
    if max_chars is None or len(text) <= max_chars:
        return text, False
    keep = max(max_chars, protected_prefix)
    log.warning("input of %d chars truncated to %d", len(text), keep)
    return text[:keep], True


class TextModel:
    """Base class; subclasses implement :meth:`complete`.

    Instances are also plain ``str -> str`` callables, which is the policy and
    predictor interface used by the environment and evaluation code.
    """

    max_input_chars: Optional[int] = None

    def complete(self, request: ModelRequest) -> str:
        raise NotImplementedError

    def generate(self, request: ModelRequest) -> ModelResponse:
        text, truncated = truncate_input(request.input, self.max_input_chars, request.protected_prefix)
        if truncated:
            request = ModelRequest(text, request.max_output_tokens, request.temperature, request.protected_prefix)
        return ModelResponse(self.complete(request), truncated)

    def __call__(self, text: str) -> str:
        return self.generate(ModelRequest(text, protected_prefix=_guess_prefix(text))).output


def _guess_prefix(text: str) -> int:
    # navigation inputs keep history + instruction; bare HTML has no protected head
    if "\n" not in text:
        return 0
    try:
        _, instruction, _ = decode_navigation_input(text)
    except ActionParseError:
        return 0
    if instruction.lstrip().startswith("<"):
        return 0
    return navigation_head_length(text)


def generate(model: TextModel, request: ModelRequest) -> ModelResponse:
    return model.generate(request)


# ---------------------------------------------------------------------------
# mocks


class ConstantModel(TextModel):
    def __init__(self, output: str):
        self.output = output

    def complete(self, request: ModelRequest) -> str:
        return self.output


class FunctionModel(TextModel):
    def __init__(self, fn: Callable[[str], str], max_input_chars: Optional[int] = None):
        self.fn = fn
        self.max_input_chars = max_input_chars

    def complete(self, request: ModelRequest) -> str:
        return self.fn(request.input)


_GOLD_MARKER = re.compile(r"<gold>(.*?)</gold>", re.DOTALL)


class EchoGoldModel(TextModel):
    """Returns the gold answer: from a ``<gold>...</gold>`` marker in the input, else a lookup table."""

    def __init__(self, golds: Optional[Mapping[str, str]] = None, default: str = ""):
        self.golds = dict(golds or {})
        self.default = default

    def complete(self, request: ModelRequest) -> str:
        match = _GOLD_MARKER.search(request.input)
        if match:
            return match.group(1)
        return self.golds.get(request.input, self.default)


class ScriptedOracleModel(TextModel):
    """Plays a navigation task perfectly by reading the encoded input like a model would."""

    def __init__(self, task):
        from .nav import get_task

        self.task = get_task(task) if isinstance(task, str) else task
        if self.task.oracle is None:
            raise ValueError(f"task {self.task.name} has no scripted oracle")

    def complete(self, request: ModelRequest) -> str:
        history, instruction, html = decode_navigation_input(request.input)
        return encode_action(self.task.oracle(history, instruction, parse_html(html)))


_REF = re.compile(r'\bref="(\d+)"')


class RandomActionModel(TextModel):
    """Uniformly random ref; click or type (a random word) with equal odds."""

    def __init__(self, seed: int = 0, words=("apple", "lyda", "N22t", "hello")):
        self.rng = random.Random(seed)
        self.words = tuple(words)

    def complete(self, request: ModelRequest) -> str:
        refs = [int(r) for r in _REF.findall(request.input)] or [1]
        ref = self.rng.randint(1, max(refs))
        if self.rng.random() < 0.5:
            return encode_action(Action.click(ref))
        return encode_action(Action.type(ref, self.rng.choice(self.words)))


# ---------------------------------------------------------------------------
# remote


@dataclass(frozen=True)
class ModelEndpoint:
    base_url: str
    timeout: float = 30.0
    max_retries: int = 3
    max_input_chars: Optional[int] = 8000
    backoff: float = 0.5
    max_in_flight: int = 8
    api_key: Optional[str] = None


class RemoteModel(TextModel):
    """POSTs ``{input, max_output_tokens, temperature}`` and reads ``{output}``.

    Timeouts, connection failures and non-2xx replies are retried with
    exponential backoff; the last error is raised once retries run out.
    """

    def __init__(self, endpoint: ModelEndpoint, sleep: Callable[[float], None] = time.sleep):
        self.endpoint = endpoint
        self.max_input_chars = endpoint.max_input_chars
        self._slots = threading.BoundedSemaphore(endpoint.max_in_flight)
        self._sleep = sleep

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = self.endpoint.api_key or os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post_once(self, request: ModelRequest) -> str:
        payload = {
            "input": request.input,
            "max_output_tokens": request.max_output_tokens,
            "temperature": request.temperature,
        }
        try:
            resp = requests.post(
                self.endpoint.base_url,
                json=payload,
                headers=self._headers(),
                timeout=self.endpoint.timeout,
            )
        except requests.Timeout as exc:
            raise Timeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if not 200 <= resp.status_code < 300:
            raise RemoteError(resp.status_code, resp.text)
        try:
            return resp.json()["output"]
        except (ValueError, KeyError, TypeError) as exc:
            raise RemoteError(resp.status_code, resp.text) from exc

    def complete(self, request: ModelRequest) -> str:
        with self._slots:
            for attempt in range(self.endpoint.max_retries + 1):
                try:
                    return self._post_once(request)
                except ModelError as exc:
                    if attempt == self.endpoint.max_retries:
                        raise
                    delay = self.endpoint.backoff * 2**attempt
                    log.warning("model call failed (%s); retry %d in %.2fs", exc, attempt + 1, delay)
                    self._sleep(delay)
        raise AssertionError("unreachable")


def make_model(spec: str, seed: int = 0, **endpoint_kwargs) -> TextModel:
    """Build a model from a short spec: ``oracle:<task>``, ``random``, ``const:<text>`` or ``remote:<url>``."""
    kind, _, arg = spec.partition(":")
    if kind == "oracle":
        return ScriptedOracleModel(arg)
    if kind == "random":
        return RandomActionModel(seed)
    if kind == "const":
        return ConstantModel(arg)
    if kind == "remote":
        return RemoteModel(ModelEndpoint(arg, **endpoint_kwargs))
    raise ValueError(f"unknown model spec {spec!r}")
