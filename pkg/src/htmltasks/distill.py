"""Description-generation corpus built from ``<label for=...>`` pairs in web archives.

Per page: parse, pair labels with the element their ``for`` names, drop unusable
label text, cut a snippet around the described element, disguise label tags,
drop snippets with a single text, then cap every description at a fixed count.
"""

from __future__ import annotations

import json
import logging
import random
import unicodedata
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence
from urllib.parse import urlparse

from .dom import HtmlDocument, NodeId, find_by_tag, parse_html, serialize
from .snippet import SnippetConfig, extract_snippet
from .warc import MalformedWarc, WarcReader

log = logging.getLogger(__name__)

LABEL_TAG_POOL = ("div", "span", "a", "label")


class NotALabel(ValueError):
    pass


@dataclass(frozen=True)
class DescriptionExample:
    snippet_html: str
    element_id: str
    description: str
    source_url: str
    tld: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> DescriptionExample:
        return cls(**json.loads(line))


@dataclass
class DistillConfig:
    max_per_description: int = 10
    label_tag_pool: tuple[str, ...] = LABEL_TAG_POOL
    drop_single_text: bool = True
    rng_seed: int = 0
    # "earliest" keeps the first examples seen; "random" keeps a seeded random subset
    balance: str = "earliest"

    def __post_init__(self):
        self.label_tag_pool = tuple(self.label_tag_pool)
        if not self.label_tag_pool:
            raise ValueError("label_tag_pool must not be empty")
        if self.max_per_description < 1:
            raise ValueError("max_per_description must be >= 1")
        if self.balance not in ("earliest", "random"):
            raise ValueError(f"unknown balance mode {self.balance!r}")


@dataclass
class DistillReport:
    warc_files: int = 0
    warc_files_aborted: int = 0
    warc_records_skipped: int = 0
    pages: int = 0
    page_errors: int = 0
    pairs_raw: int = 0
    pairs_filtered_out: int = 0
    pairs_clean: int = 0
    duplicate_id_pairs: int = 0
    ambiguous_snippet_dropped: int = 0
    single_text_dropped: int = 0
    balanced_dropped: int = 0
    emitted: int = 0
    top_descriptions: list = field(default_factory=list)
    top20_share: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n")


class LabelPair(NamedTuple):
    label: NodeId
    target: NodeId
    description: str
    # number of elements carrying the referenced id; >1 means the first one was chosen
    matches: int = 1


def extract_label_pairs(doc: HtmlDocument) -> list[LabelPair]:
    """Pair every ``label[for]`` with the first element whose ``id`` equals the ``for`` value."""
    ids: dict[str, list[NodeId]] = defaultdict(list)
    for node_id in doc.elements():
        value = doc.nodes[node_id].attributes.get("id")
        if value is not None:
            ids[value].append(node_id)
    pairs = []
    for label in find_by_tag(doc, "label"):
        target_id = doc.nodes[label].attributes.get("for")
        if target_id is None or target_id not in ids:
            continue
        matches = ids[target_id]
        if len(matches) > 1:
            log.debug("id %r appears %d times; using the first", target_id, len(matches))
        pairs.append(LabelPair(label, matches[0], doc.text_content(label), len(matches)))
    return pairs


def clean_filter(description: str) -> Optional[str]:
    """Trimmed description, or None when it has no alphanumerics or is not clean Unicode."""
    text = description.strip()
    if not text:
        return None
    for ch in text:
        if ch == "\ufffd" or unicodedata.category(ch) in ("Cs", "Co", "Cn"):
            return None
    if not any(ch.isalnum() for ch in text):
        return None
    return text


def normalize_description(text: str) -> str:
    return " ".join(text.casefold().split())


def randomize_label_tag(
    doc: HtmlDocument,
    label_node: NodeId,
    rng: random.Random,
    pool: Sequence[str] = LABEL_TAG_POOL,
) -> HtmlDocument:
    """Replace a label's tag with a uniform draw from ``pool`` and drop its ``for``."""
    if doc.element(label_node).tag != "label":
        raise NotALabel(label_node)
    out = doc.copy()
    node = out.nodes[label_node]
    node.tag = rng.choice(tuple(pool))
    node.attributes.pop("for", None)
    return out


def distinct_texts(doc: HtmlDocument) -> set[str]:
    return {t for t in (doc.nodes[i].text.strip() for i in doc.text_nodes()) if t}


def tld_of(url: str) -> str:
    host = urlparse(url).hostname or ""
    if not host or host.replace(".", "").isdigit():
        return ""
    return host.rsplit(".", 1)[-1]


class _PageResult(NamedTuple):
    examples: list[DescriptionExample]
    clean_descriptions: list[str]
    counts: dict


def page_rng(seed: int, page_index: int) -> random.Random:
    return random.Random(f"{seed}:{page_index}")


def distill_page(
    url: str,
    html: str,
    page_index: int,
    config: DistillConfig,
    snippet_cfg: SnippetConfig,
) -> _PageResult:
    """Every pipeline stage short of corpus-wide balancing, for one page."""
    counts = Counter()
    rng = page_rng(config.rng_seed, page_index)
    doc = parse_html(html, source_url=url)
    pairs = extract_label_pairs(doc)
    counts["pairs_raw"] = len(pairs)
    examples, cleaned = [], []
    for pair in pairs:
        description = clean_filter(pair.description)
        if description is None:
            counts["pairs_filtered_out"] += 1
            continue
        cleaned.append(description)
        if pair.matches > 1:
            counts["duplicate_id_pairs"] += 1
        element_id = doc.nodes[pair.target].attributes["id"]
        snippet = extract_snippet(doc, pair.target, snippet_cfg)
        sub = snippet.doc
        if sum(1 for i in sub.elements() if sub.nodes[i].attributes.get("id") == element_id) != 1:
            counts["ambiguous_snippet_dropped"] += 1
            continue
        for label in find_by_tag(sub, "label"):
            if "for" in sub.nodes[label].attributes:
                sub = randomize_label_tag(sub, label, rng, config.label_tag_pool)
        if config.drop_single_text and len(distinct_texts(sub)) < 2:
            counts["single_text_dropped"] += 1
            continue
        examples.append(
            DescriptionExample(serialize(sub), element_id, description, url, tld_of(url))
        )
    return _PageResult(examples, cleaned, dict(counts))


def _safe_distill_page(args) -> Optional[_PageResult]:
    try:
        return distill_page(*args)
    except Exception:  # noqa: BLE001 - one bad page never stops the run
        log.exception("page %s failed", args[0])
        return None


def _iter_pages(warc_paths: Iterable, report: DistillReport) -> Iterator[tuple[str, str]]:
    for path in warc_paths:
        report.warc_files += 1
        reader = WarcReader(path)
        try:
            yield from reader
        except MalformedWarc as exc:
            report.warc_files_aborted += 1
            log.warning("aborting %s: %s", path, exc)
        finally:
            report.warc_records_skipped += reader.stats.skipped


def _balance(examples: Iterable[DescriptionExample], config: DistillConfig, report: DistillReport):
    cap = config.max_per_description
    if config.balance == "earliest":
        seen: Counter = Counter()
        for ex in examples:
            key = normalize_description(ex.description)
            if seen[key] >= cap:
                report.balanced_dropped += 1
                continue
            seen[key] += 1
            yield ex
        return
    pool = list(examples)
    groups: dict[str, list[int]] = defaultdict(list)
    for i, ex in enumerate(pool):
        groups[normalize_description(ex.description)].append(i)
    rng = random.Random(f"{config.rng_seed}:balance")
    keep = set()
    for key in sorted(groups):
        idx = groups[key]
        keep.update(idx if len(idx) <= cap else rng.sample(idx, cap))
    report.balanced_dropped += len(pool) - len(keep)
    for i, ex in enumerate(pool):
        if i in keep:
            yield ex


def distill(
    warc_paths: Iterable,
    config: Optional[DistillConfig] = None,
    snippet_cfg: Optional[SnippetConfig] = None,
    report: Optional[DistillReport] = None,
    jobs: int = 1,
) -> Iterator[DescriptionExample]:
    """Stream balanced examples from WARC files; stage counts accumulate in ``report``.

    Output depends only on the inputs, their order and ``config.rng_seed``,
    whatever ``jobs`` is.
    """
    config = config or DistillConfig()
    snippet_cfg = snippet_cfg or SnippetConfig()
    report = report if report is not None else DistillReport()
    description_counts: Counter = Counter()

    def page_args():
        for index, (url, html) in enumerate(_iter_pages(warc_paths, report)):
            report.pages += 1
            yield url, html, index, config, snippet_cfg

    def results():
        if jobs > 1:
            with ProcessPoolExecutor(jobs) as pool:
                yield from pool.map(_safe_distill_page, page_args(), chunksize=8)
        else:
            yield from map(_safe_distill_page, page_args())

    def unbalanced():
        for result in results():
            if result is None:
                report.page_errors += 1
                continue
            for key, value in result.counts.items():
                setattr(report, key, getattr(report, key) + value)
            report.pairs_clean += len(result.clean_descriptions)
            description_counts.update(normalize_description(d) for d in result.clean_descriptions)
            yield from result.examples

    for ex in _balance(unbalanced(), config, report):
        report.emitted += 1
        yield ex
    total = sum(description_counts.values())
    top = description_counts.most_common(20)
    report.top_descriptions = [[d, c] for d, c in top]
    report.top20_share = sum(c for _, c in top) / total if total else 0.0


def distill_to_jsonl(
    warc_paths: Iterable,
    out_path,
    config: Optional[DistillConfig] = None,
    snippet_cfg: Optional[SnippetConfig] = None,
    report_path=None,
    jobs: int = 1,
) -> DistillReport:
    report = DistillReport()
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for ex in distill(warc_paths, config, snippet_cfg, report, jobs):
            fh.write(ex.to_json() + "\n")
    if report_path is not None:
        report.write(report_path)
    return report


def read_jsonl(path) -> list[DescriptionExample]:
    with open(path, encoding="utf-8") as fh:
        return [DescriptionExample.from_json(line) for line in fh if line.strip()]


def split_by_tld(
    examples: Sequence[DescriptionExample], test_fraction: float = 0.5, seed: int = 0
) -> tuple[list[DescriptionExample], list[DescriptionExample]]:
    """Split so that no top-level domain appears on both sides."""
    tlds = sorted({ex.tld for ex in examples})
    random.Random(seed).shuffle(tlds)
    n_test = round(len(tlds) * test_fraction)
    test_tlds = set(tlds[:n_test])
    first = [ex for ex in examples if ex.tld not in test_tlds]
    second = [ex for ex in examples if ex.tld in test_tlds]
    return first, second

