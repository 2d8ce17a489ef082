"""Heuristic description baseline: the text nearest the salient element in the HTML text."""

from __future__ import annotations

from .dom import HtmlDocument, find_target, parse_html, serialize_with_offsets

NON_CONTENT = frozenset(("script", "style"))


class NoTextNodes(ValueError):
    pass


class NoTarget(ValueError):
    pass


def closest_description(snippet: HtmlDocument) -> str:
    """Stripped text of the text node whose start offset is nearest the target's open tag.

    Offsets are character positions in the serialized snippet.  Whitespace-only
    text and script/style bodies are ignored; ties go to the earlier text.
    """
    target = find_target(snippet)
    if target is None:
        raise NoTarget("snippet has no target element")
    _, offsets = serialize_with_offsets(snippet)
    anchor = offsets[target]
    best = None
    for node_id in snippet.text_nodes():
        node = snippet.nodes[node_id]
        text = node.text.strip()
        if not text or snippet.nodes[node.parent].tag in NON_CONTENT:
            continue
        key = (abs(offsets[node_id] - anchor), offsets[node_id])
        if best is None or key < best[0]:
            best = (key, text)
    if best is None:
        raise NoTextNodes("snippet has no non-empty text")
    return best[1]


def closest_description_predictor(snippet_html: str) -> str:
    """String-to-string form for use as an evaluation predictor."""
    return closest_description(parse_html(snippet_html))
