"""HTTP client exposing a hosted language model as a scorer or translator.

Wire format (any inference server can be adapted with a thin shim):

    POST {base}/score    {"prompt": str, "prefix": [str], "top_k": int}
                      -> {"tokens": {str: float}, "eos": float}
    POST {base}/complete {"prompt": str, "max_tokens": int}
                      -> {"text": str}

A bearer token is attached when the configured environment variable is set.
Transport failures and 5xx responses are retried with exponential backoff
(0.5 s base, doubling); schema violations surface as MalformedResponse.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import httpx

from .corpus import PairCorpus
from .prompting import Prompt, PromptConfig, build_prompt

DEFAULT_TOKEN_ENV = "CNL_LM_TOKEN"


class EndpointUnavailable(ConnectionError):
    pass


class MalformedResponse(ValueError):
    pass


@dataclass(frozen=True)
class LmEndpointConfig:
    base_url: str
    token_env: str = DEFAULT_TOKEN_ENV
    timeout: float = 10.0
    max_retries: int = 2
    context_window: int = 2048
    backoff_base: float = 0.5

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class NextTokenDistribution:
    token_logps: dict[str, float]
    eos_logp: float


class LmClient:
    """Shareable; a custom ``transport`` or ``sleep`` is a test seam."""

    def __init__(self, config: LmEndpointConfig,
                 transport: Optional[httpx.BaseTransport] = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.config = config
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=config.base_url, timeout=config.timeout, transport=transport
        )

    def _headers(self) -> dict[str, str]:
        token = os.environ.get(self.config.token_env)
        return {"Authorization": f"Bearer {token}"} if token else {}

    def _post(self, path: str, payload: dict) -> dict:
        last_error: Optional[Exception] = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self.config.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.post(path, json=payload, headers=self._headers())
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = EndpointUnavailable(f"{path}: HTTP {response.status_code}")
                continue
            if response.status_code != 200:
                raise EndpointUnavailable(f"{path}: HTTP {response.status_code}")
            try:
                return response.json()
            except ValueError as exc:
                raise MalformedResponse(f"{path}: body is not JSON") from exc
        raise EndpointUnavailable(
            f"{path}: gave up after {self.config.max_retries + 1} attempts: {last_error}"
        )

    def score_next(self, prompt_text: str, prefix: Sequence[str], top_k: int = 50) -> NextTokenDistribution:
        doc = self._post("/score", {"prompt": prompt_text, "prefix": list(prefix), "top_k": top_k})
        if not isinstance(doc, dict) or "tokens" not in doc or "eos" not in doc:
            raise MalformedResponse("/score response must carry 'tokens' and 'eos'")
        tokens = doc["tokens"]
        if not isinstance(tokens, dict) or not all(
            isinstance(k, str) and isinstance(v, (int, float)) for k, v in tokens.items()
        ) or not isinstance(doc["eos"], (int, float)):
            raise MalformedResponse("/score response has ill-typed log-probabilities")
        return NextTokenDistribution(
            token_logps={k: float(v) for k, v in tokens.items()}, eos_logp=float(doc["eos"])
        )

    def complete(self, prompt_text: str, max_tokens: int = 64) -> str:
        doc = self._post("/complete", {"prompt": prompt_text, "max_tokens": max_tokens})
        if not isinstance(doc, dict) or not isinstance(doc.get("text"), str):
            raise MalformedResponse("/complete response must carry a string 'text'")
        # Keep the completion up to the first blank line, trimmed.
        return doc["text"].split("\n\n", 1)[0].strip()

    def close(self) -> None:
        self._client.close()


class RemoteLmScorer:
    """ScorerContract adapter: few-shot prompt per source, /score per step."""

    def __init__(self, client: LmClient, corpus: PairCorpus,
                 prompt_config: Optional[PromptConfig] = None, top_k: int = 50):
        self.client = client
        self.corpus = corpus
        self.prompt_config = prompt_config or PromptConfig(
            context_budget=client.config.context_window
        )
        self.top_k = top_k
        self._prompt_cache: dict[str, Prompt] = {}

    def _prompt(self, source: str) -> Prompt:
        if source not in self._prompt_cache:
            self._prompt_cache[source] = build_prompt(source, self.corpus, self.prompt_config)
        return self._prompt_cache[source]

    def score_next(self, source: str, prefix: Sequence[str]) -> tuple[dict[str, float], float]:
        dist = self.client.score_next(self._prompt(source).text, prefix, self.top_k)
        return dict(dist.token_logps), dist.eos_logp


class RemoteWholeSequenceTranslator:
    """Translator adapter for endpoints without per-token access."""

    def __init__(self, client: LmClient, corpus: PairCorpus,
                 prompt_config: Optional[PromptConfig] = None, max_tokens: int = 64):
        self.client = client
        self.corpus = corpus
        self.prompt_config = prompt_config or PromptConfig(
            context_budget=client.config.context_window
        )
        self.max_tokens = max_tokens

    def translate(self, nl: str) -> str:
        prompt = build_prompt(nl, self.corpus, self.prompt_config)
        return self.client.complete(prompt.text, self.max_tokens)
