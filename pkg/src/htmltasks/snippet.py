"""Salient-element snippet extraction by bounded ancestor traversal."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .dom import HtmlDocument, NodeId, mark_target


@dataclass(frozen=True)
class SnippetConfig:
    """Limits on how far a snippet may grow above its salient element.

    ``max_new_descendants_pct`` bounds the element count added above the
    salient subtree, as a percentage of that subtree's element count.
    ``max_height`` bounds the number of ancestor hops.
    """

    max_new_descendants_pct: float = 25.0
    max_height: int = 3

    def __post_init__(self):
        pct = self.max_new_descendants_pct
        if not math.isfinite(pct) or pct < 0:
            raise ValueError(f"max_new_descendants_pct must be finite and >= 0, got {pct}")
        if int(self.max_height) != self.max_height or self.max_height < 1:
            raise ValueError(f"max_height must be an integer >= 1, got {self.max_height}")

    def __le__(self, other):
        # componentwise partial order
        if not isinstance(other, SnippetConfig):
            return NotImplemented
        return (
            self.max_new_descendants_pct <= other.max_new_descendants_pct
            and self.max_height <= other.max_height
        )


DEFAULT_CONFIG = SnippetConfig()

# the grid swept in the snippet-size ablation
ABLATION_GRID = (
    SnippetConfig(25, 3),
    SnippetConfig(25, 4),
    SnippetConfig(50, 3),
    SnippetConfig(50, 4),
    SnippetConfig(300, 5),
    SnippetConfig(500, 7),
)


class SnippetStats(NamedTuple):
    hops: int
    new_desc_pct: float
    node_count: int


@dataclass
class Snippet:
    doc: HtmlDocument
    salient: NodeId
    config_used: SnippetConfig
    stats: SnippetStats

    @property
    def html(self) -> str:
        return str(self.doc)


def element_descendants(doc: HtmlDocument, node_id: NodeId) -> int:
    """Element count of the subtree at ``node_id``, the node itself included."""
    return len(doc.elements(node_id))


def new_descendants_pct(base: int, candidate: int) -> float:
    return 100.0 * (candidate - base) / max(base, 1)


def _choose_root(doc: HtmlDocument, salient: NodeId, config: SnippetConfig):
    doc.element(salient)
    base = element_descendants(doc, salient)
    root, hops, pct = salient, 0, 0.0
    for hop, ancestor in enumerate(doc.ancestors(salient), start=1):
        if hop > config.max_height:
            break
        candidate_pct = new_descendants_pct(base, element_descendants(doc, ancestor))
        if candidate_pct > config.max_new_descendants_pct:
            break
        root, hops, pct = ancestor, hop, candidate_pct
    return root, hops, pct


def snippet_stats(doc: HtmlDocument, salient: NodeId, config: SnippetConfig = DEFAULT_CONFIG) -> SnippetStats:
    """Hops, new-descendant percentage and node count of the root :func:`extract_snippet` picks.

    ``node_count`` counts element and text nodes in the snippet.
    """
    root, hops, pct = _choose_root(doc, salient, config)
    count = sum(1 for i in doc.iter_subtree(root) if i != doc.root)
    return SnippetStats(hops, pct, count)


def extract_snippet(doc: HtmlDocument, salient: NodeId, config: SnippetConfig = DEFAULT_CONFIG) -> Snippet:
    """Copy the subtree around ``salient`` and mark it with ``target``.

    Walks up the ancestor chain one hop at a time and accepts a parent only while
    both limits hold (inclusive); the first violation stops the walk.  The
    document node counts as an ancestor, so a top-level salient element yields
    the whole page.
    """
    root, hops, pct = _choose_root(doc, salient, config)
    sub, mapping = doc.subtree_copy(root)
    new_salient = mapping[salient]
    sub = mark_target(sub, new_salient)
    count = sum(1 for i in sub.iter_subtree() if i != sub.root)
    return Snippet(sub, new_salient, config, SnippetStats(hops, pct, count))
