"""Seeded end-to-end walkthrough: synthesize a review corpus, split it, build
both indexes, run a query in every mode, and score a fabricated prediction set.

Usage: python scripts/run_demo.py [workdir]
"""

import json
import random
import sys
from pathlib import Path

from desksearch.cli import main

PHRASES = {
    5: "absolutely loved the {} and the {} was outstanding",
    4: "really good {} though the {} could improve",
    3: "the {} was fine and the {} acceptable",
    2: "disappointing {} and a bland {}",
    1: "terrible {} and the {} was inedible",
}
NOUNS = [
    "pasta", "service", "ramen", "dessert", "coffee", "steak", "ambiance",
    "tacos", "brunch", "curry", "pizza", "sushi", "bread", "wine",
]


def synthesize_corpus(path: Path, n: int, seed: int) -> None:
    rng = random.Random(seed)
    with open(path, "w") as f:
        for i in range(n):
            stars = rng.randint(1, 5)
            text = PHRASES[stars].format(rng.choice(NOUNS), rng.choice(NOUNS))
            record = {"text": text, "stars": stars, "business_id": f"biz{i % 12}"}
            f.write(json.dumps(record) + "\n")


def run(argv: list[str]) -> None:
    print(f"$ desksearch {' '.join(argv)}")
    code = main(argv)
    if code != 0:
        sys.exit(code)


def demo(workdir: Path) -> None:
    workdir.mkdir(parents=True, exist_ok=True)
    corpus = workdir / "corpus.jsonl"
    synthesize_corpus(corpus, n=500, seed=0)

    config = workdir / "config.json"
    config.write_text(
        json.dumps(
            {
                "corpus": str(corpus),
                "index_dir": str(workdir / "index"),
                "seed": 0,
                "k": 5,
                "split": {"per_class": 40},
            },
            indent=2,
        )
    )
    flags = ["--config", str(config)]

    run(["ingest", *flags])
    run(["index", *flags])
    for mode in ("lexical", "vector", "hybrid"):
        print(f"\n-- {mode} results for 'outstanding pasta' --")
        run(["search", "outstanding pasta", "--mode", mode, *flags])

    # score a noisy predictor: correct label 70% of the time, 0-indexed labels
    rng = random.Random(1)
    predictions = workdir / "predictions.jsonl"
    with open(predictions, "w") as f:
        for line in (workdir / "index" / "test.jsonl").read_text().splitlines():
            y_true = json.loads(line)["stars"] - 1
            y_pred = y_true if rng.random() < 0.7 else rng.randrange(5)
            f.write(json.dumps({"y_true": y_true, "y_pred": y_pred}) + "\n")
    print("\n-- evaluation --")
    run(["eval", str(predictions), *flags])
    print(f"\nreports written under {workdir / 'index'}")


if __name__ == "__main__":
    demo(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_run"))
