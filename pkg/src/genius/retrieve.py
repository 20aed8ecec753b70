"""Answer a natural-language query with ranked scenarios from a collection.

The query text goes through the identical tokenizer/embedder the stored
descriptions used (enforced via the collection's embedder_id binding), the
collection is searched exactly, and the result is a JSON-ready document
carrying metadata and links.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embed import Embedder, embed
from .errors import EmbedderMismatch
from .store import Collection

DEFAULT_N = 10


@dataclass(frozen=True)
class RankedScenario:
    """One search hit, projected onto the result schema (vector omitted)."""

    id: str
    distance: float
    description: str
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "distance": self.distance,
            "description": self.description,
            "metadata": dict(self.metadata),
        }


@dataclass(frozen=True)
class QueryResult:
    """Ranked results for one query, ascending by squared distance."""

    query: str
    results: tuple[RankedScenario, ...]

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "results": [hit.to_dict() for hit in self.results],
        }


def search(
    collection: Collection,
    query_text: str,
    embedder: Embedder,
    n: int = DEFAULT_N,
) -> QueryResult:
    """Embed ``query_text`` and return the top ``n`` scenarios.

    Distances are the store's distances bit-for-bit; repeating a query yields
    an identical result.
    """
    if collection.embedder_id != embedder.embedder_id:
        raise EmbedderMismatch(
            f"collection {collection.name!r} was built with embedder "
            f"{collection.embedder_id!r}, query uses {embedder.embedder_id!r}"
        )
    vector = embed(query_text, embedder)
    hits = collection.query(vector, n)
    return QueryResult(
        query=query_text,
        results=tuple(
            RankedScenario(
                id=record.id,
                distance=distance,
                description=record.description,
                metadata=dict(record.metadata),
            )
            for record, distance in hits
        ),
    )
