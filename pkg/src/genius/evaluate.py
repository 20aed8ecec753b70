"""Retrieval-quality metrics and validation procedures.

Two evaluation shapes:

* Per-query distance profiles (full ascending distance list from a search
  over the whole collection): largest gap, min/max/range, standard
  deviation, relative largest gap, their average over a query set, a
  gap-based answer/no-answer classifier, and a Z-score outlier test on the
  closest hit.

* Grouped model-comparison runs (per scenario category, per iteration,
  distances to correct and incorrect targets): pooled means, extremes,
  difference metrics, and the average per-category spread.

Standard deviations over full profiles are population SDs (each profile is
the complete distance set, not a sample). The Z-score tail uses the sample
SD, since the tail estimates the background distribution.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .errors import (
    DegenerateProfile,
    EmptyInput,
    EmptyProfile,
    MissingLabels,
)
from .retrieve import QueryResult

LABEL_CORRECT = "correct"
LABEL_INCORRECT = "incorrect"

ANSWER_LIKE = "answer-like"
NO_ANSWER_LIKE = "no-answer-like"

DEFAULT_Z_THRESHOLD = -2.0


@dataclass(frozen=True)
class DistanceProfile:
    """All distances one query produced, optionally labeled correct/incorrect."""

    query: str
    distances: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(self.distances):
                raise ValueError(
                    f"profile {self.query!r}: {len(labels)} labels for "
                    f"{len(self.distances)} distances"
                )
            object.__setattr__(self, "labels", labels)


def profile_from_result(
    result: QueryResult, correct_ids: Iterable[str] | None = None
) -> DistanceProfile:
    """Build a profile from a search result; ground truth labels each hit."""
    labels = None
    if correct_ids is not None:
        wanted = set(correct_ids)
        labels = tuple(
            LABEL_CORRECT if hit.id in wanted else LABEL_INCORRECT
            for hit in result.results
        )
    return DistanceProfile(
        query=result.query,
        distances=tuple(hit.distance for hit in result.results),
        labels=labels,
    )


@dataclass(frozen=True)
class RetrievalReport:
    """Per-query distance statistics."""

    largest_gap: float
    min_distance: float
    max_distance: float
    range: float
    std_dev: float
    relative_largest_gap: float

    @classmethod
    def from_extremes(
        cls,
        largest_gap: float,
        min_distance: float,
        max_distance: float,
        std_dev: float = 0.0,
    ) -> "RetrievalReport":
        """Derive range and relative gap from the three extreme statistics."""
        spread = max_distance - min_distance
        return cls(
            largest_gap=largest_gap,
            min_distance=min_distance,
            max_distance=max_distance,
            range=spread,
            std_dev=std_dev,
            relative_largest_gap=largest_gap / spread if spread > 0 else 0.0,
        )

    def to_dict(self) -> dict:
        return {
            "largest_gap": self.largest_gap,
            "min_distance": self.min_distance,
            "max_distance": self.max_distance,
            "range": self.range,
            "std_dev": self.std_dev,
            "relative_largest_gap": self.relative_largest_gap,
        }


def retrieval_metrics(profile: DistanceProfile) -> RetrievalReport:
    """Gap/range/spread statistics of one profile.

    Sorts internally, so the result is invariant under input permutation.
    A single-distance profile degenerates to all-zero gap and range.
    """
    if not profile.distances:
        raise EmptyProfile(f"profile {profile.query!r} has no distances")
    ds = sorted(profile.distances)
    if len(ds) == 1:
        return RetrievalReport(
            largest_gap=0.0,
            min_distance=ds[0],
            max_distance=ds[0],
            range=0.0,
            std_dev=0.0,
            relative_largest_gap=0.0,
        )
    largest_gap = max(b - a for a, b in zip(ds, ds[1:]))
    return RetrievalReport.from_extremes(
        largest_gap=largest_gap,
        min_distance=ds[0],
        max_distance=ds[-1],
        std_dev=statistics.pstdev(ds),
    )


def arlg(profiles: Iterable["DistanceProfile | RetrievalReport | float"]) -> float:
    """Average relative largest gap over a query set.

    Accepts profiles (metrics computed on the fly), ready-made reports, or
    bare relative-gap fractions.
    """
    values = []
    for item in profiles:
        if isinstance(item, DistanceProfile):
            values.append(retrieval_metrics(item).relative_largest_gap)
        elif isinstance(item, RetrievalReport):
            values.append(item.relative_largest_gap)
        else:
            values.append(float(item))
    if not values:
        raise EmptyInput("arlg needs at least one profile")
    return statistics.fmean(values)


def arlg_classify(
    test_arlg: float, correct_arlg: float, incorrect_arlg: float
) -> str:
    """Compare a test-set ARLG against the correct/incorrect baseline.

    The baseline is the midpoint of the two reference ARLGs; a test value
    strictly above it looks like a query set with answers.
    """
    baseline = (correct_arlg + incorrect_arlg) / 2.0
    return ANSWER_LIKE if test_arlg > baseline else NO_ANSWER_LIKE


def z_score_validate(
    profile: DistanceProfile, threshold: float = DEFAULT_Z_THRESHOLD
) -> bool:
    """Does the closest hit sit anomalously near, relative to the rest?

    z = (d[0] - mean(d[1:])) / sd(d[1:]) over the sorted distances, sample
    SD; the query "has an answer" when z <= threshold.
    """
    if len(profile.distances) < 3:
        raise ValueError(
            f"profile {profile.query!r} needs >= 3 distances for Z-score "
            f"validation, got {len(profile.distances)}"
        )
    ds = sorted(profile.distances)
    tail = ds[1:]
    sd = statistics.stdev(tail)
    if sd == 0.0:
        raise DegenerateProfile(
            f"profile {profile.query!r}: all non-minimum distances are equal"
        )
    z = (ds[0] - statistics.fmean(tail)) / sd
    return z <= threshold


@dataclass(frozen=True)
class ModelComparisonReport:
    """Aggregate separation/stability metrics for one description model."""

    mean_dist_correct: float
    mean_dist_incorrect: float
    mean_distance_difference: float
    highest_dist_correct: float
    lowest_dist_incorrect: float
    smallest_distance_difference: float
    avg_std_dev_of_scenarios: float

    @classmethod
    def from_means(
        cls,
        mean_dist_correct: float,
        mean_dist_incorrect: float,
        highest_dist_correct: float,
        lowest_dist_incorrect: float,
        avg_std_dev_of_scenarios: float = 0.0,
    ) -> "ModelComparisonReport":
        return cls(
            mean_dist_correct=mean_dist_correct,
            mean_dist_incorrect=mean_dist_incorrect,
            mean_distance_difference=mean_dist_incorrect - mean_dist_correct,
            highest_dist_correct=highest_dist_correct,
            lowest_dist_incorrect=lowest_dist_incorrect,
            smallest_distance_difference=lowest_dist_incorrect - highest_dist_correct,
            avg_std_dev_of_scenarios=avg_std_dev_of_scenarios,
        )

    def to_dict(self) -> dict:
        return {
            "mean_dist_correct": self.mean_dist_correct,
            "mean_dist_incorrect": self.mean_dist_incorrect,
            "mean_distance_difference": self.mean_distance_difference,
            "highest_dist_correct": self.highest_dist_correct,
            "lowest_dist_incorrect": self.lowest_dist_incorrect,
            "smallest_distance_difference": self.smallest_distance_difference,
            "avg_std_dev_of_scenarios": self.avg_std_dev_of_scenarios,
        }


Runs = Mapping[str, Sequence[Mapping[str, Sequence[float]]]]


def _validate_runs(runs: Runs) -> None:
    if not runs:
        raise EmptyInput("model comparison needs at least one scenario category")
    for category, iterations in runs.items():
        if len(iterations) < 2:
            raise MissingLabels(
                f"category {category!r} has {len(iterations)} iteration(s); "
                "need at least 2"
            )
        for i, iteration in enumerate(iterations):
            for side in (LABEL_CORRECT, LABEL_INCORRECT):
                if not iteration.get(side):
                    raise MissingLabels(
                        f"category {category!r} iteration {i} has no "
                        f"{side!r} distances"
                    )


def model_comparison(runs: Runs) -> ModelComparisonReport:
    """Pool labeled distances across categories and iterations.

    ``runs`` maps category -> iterations, each iteration holding "correct"
    and "incorrect" distance lists. The spread metric averages, over
    categories, the population SD of that category's correct distances
    across iterations.
    """
    _validate_runs(runs)
    correct_pool: list[float] = []
    incorrect_pool: list[float] = []
    category_sds = []
    for iterations in runs.values():
        category_correct: list[float] = []
        for iteration in iterations:
            category_correct.extend(float(d) for d in iteration[LABEL_CORRECT])
            incorrect_pool.extend(float(d) for d in iteration[LABEL_INCORRECT])
        correct_pool.extend(category_correct)
        category_sds.append(statistics.pstdev(category_correct))
    return ModelComparisonReport.from_means(
        mean_dist_correct=statistics.fmean(correct_pool),
        mean_dist_incorrect=statistics.fmean(incorrect_pool),
        highest_dist_correct=max(correct_pool),
        lowest_dist_incorrect=min(incorrect_pool),
        avg_std_dev_of_scenarios=statistics.fmean(category_sds),
    )


def model_comparison_with_outliers(runs: Runs) -> dict[str, ModelComparisonReport]:
    """Report both the raw metrics and a variant excluding the two extreme
    outliers (the single highest correct distance and the single lowest
    incorrect distance)."""
    full = model_comparison(runs)
    trimmed: dict[str, list[dict[str, list[float]]]] = {
        category: [
            {
                LABEL_CORRECT: [float(d) for d in iteration[LABEL_CORRECT]],
                LABEL_INCORRECT: [float(d) for d in iteration[LABEL_INCORRECT]],
            }
            for iteration in iterations
        ]
        for category, iterations in runs.items()
    }

    def drop_once(side: str, value: float) -> None:
        # Remove one occurrence, but never empty an iteration's list.
        for iterations in trimmed.values():
            for iteration in iterations:
                pool = iteration[side]
                if value in pool and len(pool) > 1:
                    pool.remove(value)
                    return

    drop_once(LABEL_CORRECT, full.highest_dist_correct)
    drop_once(LABEL_INCORRECT, full.lowest_dist_incorrect)
    return {"all": full, "outliers_excluded": model_comparison(trimmed)}


def distance_curves(
    profiles: Sequence[DistanceProfile],
) -> list[tuple[str, int, float, str]]:
    """Plot-ready rows (query, rank, distance, label), ranks ascending
    per query; the label column is empty when ground truth is unknown."""
    if not profiles:
        raise EmptyInput("distance curves need at least one profile")
    rows = []
    for profile in profiles:
        pairs = list(
            zip(
                profile.distances,
                profile.labels or [""] * len(profile.distances),
            )
        )
        pairs.sort(key=lambda p: p[0])
        for rank, (distance, label) in enumerate(pairs, start=1):
            rows.append((profile.query, rank, distance, label))
    return rows


def write_curves_csv(profiles: Sequence[DistanceProfile], out: IO[str]) -> None:
    writer = csv.writer(out)
    writer.writerow(["query", "rank", "distance", "label"])
    for query, rank, distance, label in distance_curves(profiles):
        writer.writerow([query, rank, f"{distance:.17g}", label])
