"""HTML understanding toolkit: parsing, snippets, dataset distillation, task codecs,
a headless navigation environment, metrics and model clients."""

from __future__ import annotations

__version__ = "0.1.0"

from .dom import (
    HtmlDocument,
    HtmlNode,
    NodeKind,
    assign_refs,
    find_target,
    parse_html,
    serialize,
    strip_closing_tags,
)
from .snippet import ABLATION_GRID, DEFAULT_CONFIG, Snippet, SnippetConfig, extract_snippet
from .codec import (
    Action,
    ActionParseError,
    CategoryVocabulary,
    canonicalize_category,
    encode_action,
    encode_navigation_input,
    parse_action,
)
from .distill import DescriptionExample, DistillConfig, DistillReport, distill, distill_to_jsonl
from .metrics import bleu, exact_match, rouge1
from .baselines import closest_description
from .evaluation import EvalReport, evaluate

__all__ = [
    "ABLATION_GRID",
    "Action",
    "ActionParseError",
    "CategoryVocabulary",
    "DEFAULT_CONFIG",
    "DescriptionExample",
    "DistillConfig",
    "DistillReport",
    "EvalReport",
    "HtmlDocument",
    "HtmlNode",
    "NodeKind",
    "Snippet",
    "SnippetConfig",
    "assign_refs",
    "bleu",
    "canonicalize_category",
    "closest_description",
    "distill",
    "distill_to_jsonl",
    "encode_action",
    "encode_navigation_input",
    "evaluate",
    "exact_match",
    "extract_snippet",
    "find_target",
    "parse_action",
    "parse_html",
    "rouge1",
    "serialize",
    "strip_closing_tags",
]
