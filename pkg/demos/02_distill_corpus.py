"""Turn a small crawl into balanced (snippet, description) pairs.

The bundled corpus has 40 pages in four WARC files, two of them gzipped.
Twenty-five pages label their email box "Email", so balancing keeps ten.

    python demos/02_distill_corpus.py
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

from htmltasks.distill import DistillConfig, DistillReport, distill, normalize_description
from htmltasks.snippet import SnippetConfig

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "corpus"


def main() -> None:
    paths = sorted(CORPUS.iterdir())
    report = DistillReport()
    examples = list(distill(paths, DistillConfig(rng_seed=0), SnippetConfig(300, 5), report))

    print("stage counts:")
    for key, value in report.to_dict().items():
        print(f"  {key:28s} {value}")

    top = Counter(normalize_description(ex.description) for ex in examples).most_common(5)
    print("\nmost common descriptions:", top)

    ex = examples[0]
    print(f"\nfirst example ({ex.tld}): {ex.description!r}")
    print(ex.snippet_html)


if __name__ == "__main__":
    main()
