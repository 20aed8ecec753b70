"""Map description text to a unit-norm vector.

The default embedder is a signed feature-hashing bag of tokens: fully
deterministic and dependency-free, so the whole pipeline runs and tests
without any model service. It preserves the one property downstream code
relies on (shared tokens => smaller squared distance); it is explicitly not
a semantic model. Remote embedders plug in behind the same interface (see
adapters.HttpEmbedder).
"""

from __future__ import annotations

import re
from typing import Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch, EmbedError, NoTokens
from .fnv import fnv1a64

DEFAULT_DIM = 256

# Unicode letters and digits; underscores split like any other punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

NORM_TOLERANCE = 1e-6


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(text.lower())


class Embedder(Protocol):
    """Anything that turns a batch of texts into row vectors of fixed width."""

    @property
    def embedder_id(self) -> str: ...

    @property
    def dim(self) -> int: ...

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]: ...


class HashingEmbedder:
    """Deterministic reference embedder: signed token hashing, L2-normalized.

    Per token: 64-bit FNV-1a hash; bucket = hash mod dim; sign is +1 when
    bit 63 is clear, -1 otherwise. Token counts accumulate into buckets and
    the result is L2-normalized. Bag-of-tokens by construction, so token
    order does not matter ("snow tunnel" == "tunnel snow") -- a known
    limitation shared with any bag model.
    """

    def __init__(self, dim: int = DEFAULT_DIM) -> None:
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def embedder_id(self) -> str:
        return f"hash{self._dim}"

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self._embed_one(text) for text in texts]

    def _embed_one(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise NoTokens(f"no alphanumeric tokens in {text!r}")
        acc = np.zeros(self._dim, dtype=np.float64)
        for token in tokens:
            h = fnv1a64(token.encode("utf-8"))
            sign = 1.0 if (h >> 63) == 0 else -1.0
            acc[h % self._dim] += sign
        norm = float(np.linalg.norm(acc))
        if norm == 0.0:
            # Opposite-sign tokens can cancel bucket-for-bucket; vanishingly
            # rare on real text but not impossible.
            raise EmbedError(f"token hashes cancelled to a zero vector for {text!r}")
        return acc / norm


def _validate_vector(vec: np.ndarray, dim: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    if vec.ndim != 1:
        raise EmbedError(f"embedding must be a flat vector, got shape {vec.shape}")
    if vec.shape[0] != dim:
        raise DimensionMismatch(
            f"embedding has dim {vec.shape[0]}, embedder declares {dim}"
        )
    if not np.all(np.isfinite(vec)):
        raise EmbedError("embedding contains non-finite values")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise EmbedError(f"embedding norm {norm} is not 1 within {NORM_TOLERANCE}")
    return vec


def embed(text: str, embedder: Embedder) -> np.ndarray:
    """Embed one text into a unit-norm float64 vector.

    Raises NoTokens when the text has no alphanumeric token after
    lowercasing; identical text always yields an identical vector.
    """
    if not tokenize(text):
        raise NoTokens(f"no alphanumeric tokens in {text!r}")
    vectors = embedder.embed_batch([text])
    if len(vectors) != 1:
        raise EmbedError(f"embedder returned {len(vectors)} vectors for one text")
    return _validate_vector(vectors[0], embedder.dim)


def batch_embed(texts: Sequence[str], embedder: Embedder) -> list[np.ndarray]:
    """Embed many texts, preserving order; element i equals embed(texts[i]).

    Errors from individual texts are re-raised with the failing index
    attached (``.index`` attribute and message prefix).
    """
    for i, text in enumerate(texts):
        if not tokenize(text):
            raise _with_index(NoTokens(f"no alphanumeric tokens in {text!r}"), i)
    if not texts:
        return []
    vectors = embedder.embed_batch(list(texts))
    if len(vectors) != len(texts):
        raise EmbedError(
            f"embedder returned {len(vectors)} vectors for {len(texts)} texts"
        )
    out = []
    for i, vec in enumerate(vectors):
        try:
            out.append(_validate_vector(vec, embedder.dim))
        except (EmbedError, DimensionMismatch) as exc:
            raise _with_index(type(exc)(f"texts[{i}]: {exc}"), i) from exc
    return out


def _with_index(exc: Exception, index: int):
    exc.index = index  # type: ignore[attr-defined]
    return exc


def squared_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Euclidean distance; equals 2 - 2<a,b> for unit vectors."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return float(np.dot(diff, diff))
