"""Review ingestion and the balanced/unbalanced split protocol.

Input is JSON-lines with fields text (string), stars (integer 1..5), and
business_id (string).  Malformed lines are skipped and counted, never fatal.
Splitting shuffles with a seeded RNG and cuts train/val/test by percentage
(any rounding remainder goes to train); val and test keep the natural class
imbalance, while the train portion can be balanced separately with
balanced_resample.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .io_utils import atomic_write_text

STAR_VALUES = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class Review:
    text: str
    stars: int
    business_id: str

    def __post_init__(self) -> None:
        if self.stars not in STAR_VALUES:
            raise ValueError(f"stars must be in 1..5, got {self.stars!r}")


@dataclass(frozen=True)
class SplitSpec:
    train_pct: int = 70
    val_pct: int = 15
    test_pct: int = 15
    per_class_train: int | None = None  # None: leave the train split unbalanced
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.train_pct, self.val_pct, self.test_pct) <= 0:
            raise ValueError("split proportions must be positive")
        if self.train_pct + self.val_pct + self.test_pct != 100:
            raise ValueError("split proportions must sum to 100")
        if self.per_class_train is not None and self.per_class_train < 1:
            raise ValueError("per_class_train must be positive when set")


@dataclass
class DatasetBundle:
    train: list[Review]
    validation: list[Review]
    test: list[Review]


@dataclass
class LoadResult:
    reviews: list[Review]
    skipped: int

    @property
    def total_lines(self) -> int:
        return len(self.reviews) + self.skipped


def _parse_stars(value: object) -> int:
    # Accept ints and integer-valued floats ("stars": 5.0); bool is not a rating.
    if isinstance(value, bool):
        raise ValueError("stars must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ValueError(f"stars must be an integer, got {value!r}")


def load_reviews(path: str | Path) -> LoadResult:
    """Read reviews from a JSON-lines file, skipping and counting bad lines."""
    reviews: list[Review] = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip() == "":
                skipped += 1
                continue
            try:
                record = json.loads(line)
                text, business_id = record["text"], record["business_id"]
                if not isinstance(text, str) or not isinstance(business_id, str):
                    raise ValueError("text and business_id must be strings")
                review = Review(
                    text=text, stars=_parse_stars(record["stars"]), business_id=business_id
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                skipped += 1
                continue
            reviews.append(review)
    return LoadResult(reviews=reviews, skipped=skipped)


def filter_by_business(reviews: list[Review], allowed_ids: set[str]) -> list[Review]:
    """Order-preserving subset of reviews whose business id is allowed."""
    return [r for r in reviews if r.business_id in allowed_ids]


def class_distribution(reviews: list[Review]) -> dict[int, float]:
    """Proportion of reviews per star value, over the classes present."""
    if not reviews:
        raise ValueError("class distribution of an empty review list is undefined")
    counts = Counter(r.stars for r in reviews)
    n = len(reviews)
    return {stars: counts[stars] / n for stars in sorted(counts)}


def balanced_resample(reviews: list[Review], per_class: int, seed: int) -> list[Review]:
    """Draw exactly per_class reviews for every star value 1..5, without
    replacement, via a seeded shuffle.  Deterministic given (input order, seed)."""
    if per_class < 1:
        raise ValueError("per_class must be positive")
    by_class: dict[int, list[Review]] = {stars: [] for stars in STAR_VALUES}
    for review in reviews:
        by_class[review.stars].append(review)
    for stars in STAR_VALUES:
        if len(by_class[stars]) < per_class:
            raise ValueError(
                f"class {stars} has only {len(by_class[stars])} reviews, "
                f"need {per_class}"
            )
    rng = random.Random(seed)
    sample: list[Review] = []
    for stars in STAR_VALUES:
        pool = list(by_class[stars])
        rng.shuffle(pool)
        sample.extend(pool[:per_class])
    return sample


def split(reviews: list[Review], spec: SplitSpec) -> DatasetBundle:
    """Seeded shuffle, then cut by percentage with the remainder going to train."""
    if not reviews:
        raise ValueError("cannot split an empty review list")
    n = len(reviews)
    n_val = n * spec.val_pct // 100
    n_test = n * spec.test_pct // 100
    n_train = n - n_val - n_test

    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    shuffled = [reviews[i] for i in order]
    return DatasetBundle(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
    )


def review_to_json(review: Review, **extra: object) -> str:
    record: dict[str, object] = {
        "text": review.text,
        "stars": review.stars,
        "business_id": review.business_id,
    }
    record.update(extra)
    return json.dumps(record, ensure_ascii=False)


def write_reviews(reviews: list[Review], path: str | Path, split_name: str) -> None:
    """Write one split as JSON-lines with an added ``split`` field."""
    lines = [review_to_json(r, split=split_name) for r in reviews]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
