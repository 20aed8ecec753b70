"""HTTP adapters for the three pluggable model services.

Wire contracts:
  vision    POST {endpoint}/describe  {"image_b64": ..., "prompt": ...} -> {"text": ...}
  combiner  POST {endpoint}/generate  {"prompt": ...}                   -> {"text": ...}
  embedder  POST {endpoint}/embed     {"texts": [...]} -> {"embeddings": [[...]], "dim": D}

Each adapter uses a per-request timeout and bounded retries with linear
backoff (both configurable). Retries apply to transport failures and 5xx
replies only; a malformed 200 is never retried.
"""

from __future__ import annotations

import base64
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import httpx
import numpy as np

from .errors import (
    CombinerServiceMalformedReply,
    CombinerServiceUnavailable,
    DimensionMismatch,
    EmbedderServiceUnavailable,
    GeniusError,
    VisionServiceMalformedReply,
    VisionServiceUnavailable,
)

DEFAULT_VISION_PROMPT = (
    "Describe the road scene in this image in one or two factual sentences."
)
DEFAULT_COMBINER_PROMPT = (
    "Combine the following two descriptions of the same driving scenario "
    "into one fluent paragraph.\nSignals: {signal_text}\nCamera: {vision_text}"
)


@dataclass(frozen=True)
class AdapterConfig:
    """Shared HTTP behaviour for all remote adapters."""

    timeout_s: float = 10.0
    retries: int = 2
    backoff_s: float = 0.25


def _post_json(
    endpoint: str,
    payload: dict,
    config: AdapterConfig,
    unavailable: Callable[[str], GeniusError],
) -> dict:
    last_error = "no attempt made"
    for attempt in range(config.retries + 1):
        if attempt:
            time.sleep(config.backoff_s * attempt)
        try:
            response = httpx.post(endpoint, json=payload, timeout=config.timeout_s)
        except httpx.HTTPError as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            continue
        if response.status_code >= 500:
            last_error = f"HTTP {response.status_code}"
            continue
        if response.status_code != 200:
            raise unavailable(f"{endpoint}: HTTP {response.status_code}")
        try:
            body = response.json()
        except ValueError as exc:
            raise unavailable(f"{endpoint}: reply is not JSON ({exc})") from exc
        if not isinstance(body, dict):
            raise unavailable(f"{endpoint}: reply is not a JSON object")
        return body
    raise unavailable(f"{endpoint}: unreachable after {config.retries + 1} attempts ({last_error})")


class HttpVisionDescriber:
    """Remote vision model behind POST /describe."""

    def __init__(
        self,
        endpoint: str,
        prompt: str = DEFAULT_VISION_PROMPT,
        config: AdapterConfig | None = None,
    ) -> None:
        self._endpoint = endpoint.rstrip("/") + "/describe"
        self._prompt = prompt
        self._config = config or AdapterConfig()

    def describe(self, frame_ref: Path) -> str:
        image_b64 = base64.b64encode(Path(frame_ref).read_bytes()).decode("ascii")
        body = _post_json(
            self._endpoint,
            {"image_b64": image_b64, "prompt": self._prompt},
            self._config,
            VisionServiceUnavailable,
        )
        text = body.get("text")
        if not isinstance(text, str):
            raise VisionServiceMalformedReply(
                f"{self._endpoint}: reply lacks a string 'text' field"
            )
        return text


class HttpTextCombiner:
    """Remote generation model behind POST /generate.

    The prompt is a config string with {signal_text} / {vision_text}
    placeholders.
    """

    def __init__(
        self,
        endpoint: str,
        prompt_template: str = DEFAULT_COMBINER_PROMPT,
        config: AdapterConfig | None = None,
    ) -> None:
        self._endpoint = endpoint.rstrip("/") + "/generate"
        self._prompt_template = prompt_template
        self._config = config or AdapterConfig()

    def combine(self, signal_text: str, vision_text: str) -> str:
        prompt = self._prompt_template.replace(
            "{signal_text}", signal_text
        ).replace("{vision_text}", vision_text)
        body = _post_json(
            self._endpoint,
            {"prompt": prompt},
            self._config,
            CombinerServiceUnavailable,
        )
        text = body.get("text")
        if not isinstance(text, str):
            raise CombinerServiceMalformedReply(
                f"{self._endpoint}: reply lacks a string 'text' field"
            )
        text = text.strip()
        if not text:
            raise CombinerServiceMalformedReply(
                f"{self._endpoint}: reply text is empty"
            )
        return text


class HttpEmbedder:
    """Remote embedding model behind POST /embed.

    Vectors are re-normalized unless already unit norm; the squared-distance
    range [0, 4] the store relies on presupposes normalized embeddings. The
    first reply pins the dimension when none was configured.
    """

    def __init__(
        self,
        endpoint: str,
        dim: int | None = None,
        embedder_id: str | None = None,
        config: AdapterConfig | None = None,
    ) -> None:
        self._endpoint_root = endpoint.rstrip("/")
        self._endpoint = self._endpoint_root + "/embed"
        self._dim = dim
        self._embedder_id = embedder_id or f"http:{self._endpoint_root}"
        self._config = config or AdapterConfig()

    @property
    def embedder_id(self) -> str:
        return self._embedder_id

    @property
    def endpoint_root(self) -> str:
        return self._endpoint_root

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise EmbedderServiceUnavailable(
                f"{self._endpoint}: dimension unknown before the first reply"
            )
        return self._dim

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        body = _post_json(
            self._endpoint,
            {"texts": list(texts)},
            self._config,
            EmbedderServiceUnavailable,
        )
        embeddings = body.get("embeddings")
        reported_dim = body.get("dim")
        if not isinstance(embeddings, list) or not isinstance(reported_dim, int):
            raise EmbedderServiceUnavailable(
                f"{self._endpoint}: reply lacks 'embeddings' list / integer 'dim'"
            )
        if len(embeddings) != len(texts):
            raise EmbedderServiceUnavailable(
                f"{self._endpoint}: {len(embeddings)} embeddings for "
                f"{len(texts)} texts"
            )
        if self._dim is not None and reported_dim != self._dim:
            raise DimensionMismatch(
                f"{self._endpoint}: reply declares dim {reported_dim}, "
                f"adapter is bound to {self._dim}"
            )
        if self._dim is None:
            self._dim = reported_dim
        out = []
        for i, raw in enumerate(embeddings):
            vec = np.asarray(raw, dtype=np.float64)
            if vec.ndim != 1 or vec.shape[0] != reported_dim:
                raise EmbedderServiceUnavailable(
                    f"{self._endpoint}: embedding {i} has shape {vec.shape}, "
                    f"reply declared dim {reported_dim}"
                )
            norm = float(np.linalg.norm(vec))
            if norm == 0.0 or not np.isfinite(norm):
                raise EmbedderServiceUnavailable(
                    f"{self._endpoint}: embedding {i} is zero or non-finite"
                )
            if abs(norm - 1.0) > 1e-6:
                vec = vec / norm
            out.append(vec)
        return out
