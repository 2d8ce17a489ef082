"""Text encodings for model inputs and outputs of the three HTML tasks.

Actions travel as flat key/value records, ``{action: click, ref: 6}`` or
``{action: type, ref: 5, text: hello}``.  Navigation inputs are the action
history, instruction and HTML joined by newlines.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .dom import parse_html, serialize

FIELD_DELIMITER = "\n"


class ActionParseError(ValueError):
    kind = "parse_error"


class MalformedRecord(ActionParseError):
    kind = "malformed_record"


class NonIntegerRef(ActionParseError):
    kind = "non_integer_ref"


class UnknownFunction(ActionParseError):
    kind = "unknown_function"


class MissingText(ActionParseError):
    kind = "missing_text"


class DuplicateCategory(ValueError):
    pass


class ActionFunction(str, enum.Enum):
    CLICK = "click"
    TYPE = "type"


@dataclass(frozen=True)
class Action:
    function: ActionFunction
    ref: int
    text: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "function", ActionFunction(self.function))
        if isinstance(self.ref, bool) or not isinstance(self.ref, int) or self.ref < 1:
            raise ValueError(f"ref must be a positive integer, got {self.ref!r}")
        if self.function is ActionFunction.CLICK and self.text is not None:
            raise ValueError("click actions carry no text")
        if self.function is ActionFunction.TYPE and self.text is None:
            raise ValueError("type actions need text")

    @classmethod
    def click(cls, ref: int) -> Action:
        return cls(ActionFunction.CLICK, ref)

    @classmethod
    def type(cls, ref: int, text: str) -> Action:
        return cls(ActionFunction.TYPE, ref, text)

    def to_dict(self) -> dict:
        out = {"action": self.function.value, "ref": self.ref}
        if self.text is not None:
            out["text"] = self.text
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> Action:
        return cls(ActionFunction(data["action"]), data["ref"], data.get("text"))

    def __str__(self) -> str:
        return encode_action(self)


def encode_action(action: Action) -> str:
    if action.function is ActionFunction.CLICK:
        return f"{{action: click, ref: {action.ref}}}"
    return f"{{action: type, ref: {action.ref}, text: {action.text}}}"


_RECORD = re.compile(
    r"\{action: (?P<function>[^,{}]*), ref: (?P<ref>[^,{}]*?)(?P<rest>, text: (?P<text>.*))?\}",
    re.DOTALL,
)


def parse_action(model_output: str) -> Action:
    """Strictly parse one action record; only surrounding whitespace is tolerated.

    Raises :class:`MalformedRecord`, :class:`UnknownFunction`,
    :class:`NonIntegerRef` or :class:`MissingText`, checked in that order.
    """
    match = _RECORD.fullmatch(model_output.strip())
    if match is None:
        raise MalformedRecord(f"not an action record: {model_output!r}")
    name = match["function"]
    try:
        function = ActionFunction(name)
    except ValueError:
        raise UnknownFunction(f"unknown action {name!r}") from None
    ref_text = match["ref"]
    if not re.fullmatch(r"[0-9]+", ref_text):
        raise NonIntegerRef(f"ref is not an integer: {ref_text!r}")
    ref = int(ref_text)
    if ref < 1:
        raise MalformedRecord(f"ref must be positive, got {ref}")
    text = match["text"]
    if function is ActionFunction.CLICK:
        if match["rest"] is not None:
            raise MalformedRecord("click actions carry no text")
        return Action.click(ref)
    if text is None:
        raise MissingText("type action without text")
    return Action.type(ref, text)


# ---------------------------------------------------------------------------
# navigation


@dataclass
class NavigationStep:
    action_history: list[Action]
    instruction: str
    html: str
    action: Action

    def to_dict(self) -> dict:
        return {
            "action_history": [a.to_dict() for a in self.action_history],
            "instruction": self.instruction,
            "html": self.html,
            "action": self.action.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> NavigationStep:
        return cls(
            [Action.from_dict(a) for a in data["action_history"]],
            data["instruction"],
            data["html"],
            Action.from_dict(data["action"]),
        )


def encode_history(history: Sequence[Action]) -> str:
    return " ".join(encode_action(a) for a in history)


def encode_navigation_input(
    history: Sequence[Action], instruction: str, html: str
) -> str:
    """History line (omitted when empty), instruction, then raw HTML."""
    head = [encode_history(history)] if history else []
    return FIELD_DELIMITER.join(head + [instruction, html])


def encode_step(step: NavigationStep) -> str:
    return encode_navigation_input(step.action_history, step.instruction, step.html)


def navigation_head_length(encoded: str) -> int:
    """Characters before the HTML field, i.e. the part a truncation must keep."""
    return len(encoded) - len(decode_navigation_input(encoded)[2])


def decode_navigation_input(encoded: str) -> tuple[list[Action], str, str]:
    """Inverse of :func:`encode_navigation_input`."""
    first, _, rest = encoded.partition(FIELD_DELIMITER)
    history: list[Action] = []
    if first.startswith("{action: "):
        history = [parse_action(chunk) for chunk in _split_history(first)]
        first, _, rest = rest.partition(FIELD_DELIMITER)
    return history, first, rest


def _split_history(line: str) -> list[str]:
    # records are space-joined; a type payload may itself contain "} {"
    chunks = re.split(r"(?<=\}) (?=\{action: )", line)
    out: list[str] = []
    for chunk in chunks:
        if out and not _RECORD.fullmatch(out[-1]):
            out[-1] += " " + chunk
        else:
            out.append(chunk)
    return out


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class CategoryVocabulary:
    names: tuple[str, ...]
    paraphrase_map: Mapping[str, str] = field(default_factory=dict)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(dict.fromkeys(self.names)))
        object.__setattr__(self, "paraphrase_map", dict(self.paraphrase_map))
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})
        if not self.names:
            raise ValueError("vocabulary is empty")
        bad = sorted(v for v in self.paraphrase_map.values() if v not in self.names)
        if bad:
            raise ValueError(f"paraphrases map to unknown categories: {bad}")

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    @classmethod
    def from_dict(cls, data: Mapping) -> CategoryVocabulary:
        return cls(tuple(data["categories"]), data.get("paraphrases", {}))

    @classmethod
    def load(cls, path=None) -> CategoryVocabulary:
        """Load a JSON file with ``categories`` and ``paraphrases``; default is the bundled one."""
        if path is None:
            text = resources.files("htmltasks").joinpath("data/categories.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        return cls.from_dict(json.loads(text))

    def with_categories(self, extra: Iterable[str]) -> CategoryVocabulary:
        return CategoryVocabulary(self.names + tuple(extra), self.paraphrase_map)


@dataclass
class ClassificationExample:
    snippet_html: str
    category: str


class DecodedCategory(NamedTuple):
    category: str
    in_vocabulary: bool


def encode_classification_input(snippet_html: str) -> str:
    return snippet_html


def underscore_rewrites(raw: str) -> list[str]:
    """Rotations of the ``_``-separated tokens, then rotations of the reversed tokens."""
    tokens = raw.split("_")
    out: list[str] = []
    for seq in (tokens, tokens[::-1]):
        for k in range(len(seq)):
            candidate = "_".join(seq[k:] + seq[:k])
            if candidate not in out:
                out.append(candidate)
    return out


def canonicalize_category(raw: str, vocab: CategoryVocabulary) -> Optional[str]:
    """Map a free-form prediction onto the vocabulary, or None.

    In-vocabulary input is returned as is; otherwise the paraphrase table is
    consulted, then token rotations and reversals around ``_``.
    """
    text = raw.strip()
    if text in vocab:
        return text
    for key in (text, text.lower()):
        if key in vocab.paraphrase_map:
            return vocab.paraphrase_map[key]
    if "_" in text:
        for candidate in underscore_rewrites(text):
            if candidate in vocab:
                return candidate
    return None


def decode_category(model_output: str, vocab: CategoryVocabulary) -> DecodedCategory:
    text = model_output.strip()
    canonical = canonicalize_category(text, vocab)
    if canonical is None:
        return DecodedCategory(text, False)
    return DecodedCategory(canonical, True)


# ---------------------------------------------------------------------------
# few-shot prompting

PROMPT_DROP_TAGS = frozenset(("svg", "path", "img", "iframe"))


def clean_prompt_example(html: str) -> str:
    """Remove svg/path/img/iframe subtrees and every ``class`` attribute."""
    doc = parse_html(html)
    for node_id in doc.elements():
        node = doc.nodes[node_id]
        if node.parent is None:
            continue
        if node.tag in PROMPT_DROP_TAGS:
            doc.detach(node_id)
        else:
            node.attributes.pop("class", None)
    return serialize(doc)


def build_fewshot_prompt(
    examples: Sequence[ClassificationExample],
    query_html: str,
    vocab: Optional[CategoryVocabulary] = None,
) -> str:
    """``<html>\\nRole: <category>`` blocks, one per example, then the open query block."""
    seen = set()
    for ex in examples:
        if ex.category in seen:
            raise DuplicateCategory(ex.category)
        seen.add(ex.category)
    ordered = list(examples)
    if vocab is not None:
        rank = {name: i for i, name in enumerate(vocab.names)}
        ordered.sort(key=lambda ex: rank.get(ex.category, len(rank)))
    blocks = [f"{clean_prompt_example(ex.snippet_html)}\nRole: {ex.category}" for ex in ordered]
    blocks.append(f"{clean_prompt_example(query_html)}\nRole:")
    return "\n\n".join(blocks)
