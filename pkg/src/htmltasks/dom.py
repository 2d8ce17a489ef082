"""HTML tree model: forgiving parser, serializer, ref numbering and corruption.

Documents are arenas of :class:`HtmlNode` addressed by integer ids.  Node 0 is
always a synthetic document node that holds the top-level elements and text,
so fragments with several top-level elements still form a single tree.

Text is kept verbatim: no entity decoding, no whitespace collapsing.  Comments,
doctypes and processing instructions are dropped by the parser.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

NodeId = int

VOID_TAGS = frozenset(
    "area base br col embed hr img input keygen link meta param source track wbr".split()
)
RAW_TEXT_TAGS = frozenset(("script", "style", "textarea", "title"))

TARGET_ATTR = "target"
REF_ATTR = "ref"


class DomError(Exception):
    pass


class ParseError(DomError):
    pass


class NotAnElement(DomError):
    pass


class UnknownNode(DomError, KeyError):
    pass


class NodeKind(enum.Enum):
    DOCUMENT = "document"
    ELEMENT = "element"
    TEXT = "text"


@dataclass
class HtmlNode:
    kind: NodeKind
    tag: str = ""
    # None marks a bare attribute such as ``target``.
    attributes: dict[str, Optional[str]] = field(default_factory=dict)
    text: str = ""
    children: list[NodeId] = field(default_factory=list)
    parent: Optional[NodeId] = None
    ref: Optional[int] = None

    @property
    def is_element(self) -> bool:
        return self.kind is NodeKind.ELEMENT

    @property
    def is_text(self) -> bool:
        return self.kind is NodeKind.TEXT

    def copy(self) -> HtmlNode:
        return HtmlNode(
            self.kind,
            self.tag,
            dict(self.attributes),
            self.text,
            list(self.children),
            self.parent,
            self.ref,
        )


@dataclass
class HtmlDocument:
    nodes: list[HtmlNode]
    source_url: Optional[str] = None
    root: NodeId = 0

    @classmethod
    def empty(cls, source_url: Optional[str] = None) -> HtmlDocument:
        return cls([HtmlNode(NodeKind.DOCUMENT)], source_url)

    def copy(self) -> HtmlDocument:
        return HtmlDocument([n.copy() for n in self.nodes], self.source_url, self.root)

    def __getitem__(self, node_id: NodeId) -> HtmlNode:
        return self.node(node_id)

    def node(self, node_id: NodeId) -> HtmlNode:
        if not isinstance(node_id, int) or not 0 <= node_id < len(self.nodes):
            raise UnknownNode(node_id)
        node = self.nodes[node_id]
        if node.parent is None and node_id != self.root:
            raise UnknownNode(node_id)
        return node

    def element(self, node_id: NodeId) -> HtmlNode:
        node = self.node(node_id)
        if not node.is_element:
            raise NotAnElement(node_id)
        return node

    def add_node(self, node: HtmlNode, parent: NodeId) -> NodeId:
        node_id = len(self.nodes)
        node.parent = parent
        self.nodes.append(node)
        self.nodes[parent].children.append(node_id)
        return node_id

    def detach(self, node_id: NodeId) -> None:
        """Unlink a subtree; its ids stay allocated but become invalid."""
        node = self.node(node_id)
        if node_id == self.root:
            raise DomError("cannot detach the document node")
        self.nodes[node.parent].children.remove(node_id)
        for sub in list(self.iter_subtree(node_id)):
            self.nodes[sub].parent = None

    def iter_subtree(self, start: Optional[NodeId] = None) -> Iterator[NodeId]:
        """Pre-order walk from ``start`` (inclusive)."""
        stack = [self.root if start is None else start]
        while stack:
            node_id = stack.pop()
            yield node_id
            stack.extend(reversed(self.nodes[node_id].children))

    def elements(self, start: Optional[NodeId] = None) -> list[NodeId]:
        return [i for i in self.iter_subtree(start) if self.nodes[i].is_element]

    def text_nodes(self, start: Optional[NodeId] = None) -> list[NodeId]:
        return [i for i in self.iter_subtree(start) if self.nodes[i].is_text]

    def ancestors(self, node_id: NodeId) -> list[NodeId]:
        """Parent first, document node last."""
        out = []
        parent = self.node(node_id).parent
        while parent is not None:
            out.append(parent)
            parent = self.nodes[parent].parent
        return out

    def text_content(self, node_id: NodeId) -> str:
        return "".join(self.nodes[i].text for i in self.text_nodes(node_id))

    def by_ref(self, ref: int) -> Optional[NodeId]:
        for i in self.elements():
            if self.nodes[i].ref == ref:
                return i
        return None

    def structure(self, start: Optional[NodeId] = None) -> tuple:
        """Hashable nested view (tags, attributes, text, child order) for equality checks."""
        node = self.nodes[self.root if start is None else start]
        children = tuple(self.structure(c) for c in node.children)
        if node.is_text:
            return ("#text", node.text)
        if node.kind is NodeKind.DOCUMENT:
            return ("#document", children)
        return (node.tag, tuple(node.attributes.items()), children)

    def subtree_copy(self, top: NodeId) -> tuple[HtmlDocument, dict[NodeId, NodeId]]:
        """Copy the subtree at ``top`` into a new document; returns it with an old->new id map.

        If ``top`` is the document node the whole document is copied.
        """
        self.node(top)
        out = HtmlDocument.empty(self.source_url)
        mapping: dict[NodeId, NodeId] = {}
        if top == self.root:
            mapping[self.root] = out.root
            todo = [(c, out.root) for c in self.nodes[top].children]
        else:
            todo = [(top, out.root)]
        todo.reverse()
        while todo:
            old, new_parent = todo.pop()
            src = self.nodes[old]
            clone = HtmlNode(src.kind, src.tag, dict(src.attributes), src.text, ref=src.ref)
            mapping[old] = out.add_node(clone, new_parent)
            todo.extend((c, mapping[old]) for c in reversed(src.children))
        return out, mapping

    def __str__(self) -> str:
        return serialize(self)


# ---------------------------------------------------------------------------
# parsing


def _is_tag_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


class _TreeBuilder:
    def __init__(self, source_url: Optional[str]):
        self.doc = HtmlDocument.empty(source_url)
        self.stack: list[NodeId] = [self.doc.root]
        self.pending_text: list[str] = []

    def text(self, chunk: str) -> None:
        if chunk:
            self.pending_text.append(chunk)

    def flush(self) -> None:
        if self.pending_text:
            text = "".join(self.pending_text)
            self.pending_text.clear()
            self.doc.add_node(HtmlNode(NodeKind.TEXT, text=text), self.stack[-1])

    def start(self, tag: str, attrs: dict[str, Optional[str]], self_closing: bool) -> None:
        self.flush()
        node_id = self.doc.add_node(HtmlNode(NodeKind.ELEMENT, tag, attrs), self.stack[-1])
        if tag not in VOID_TAGS and not self_closing:
            self.stack.append(node_id)

    def end(self, tag: str) -> None:
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.doc.nodes[self.stack[depth]].tag == tag:
                self.flush()
                del self.stack[depth:]
                return
        # stray end tag: ignored

    def finish(self) -> HtmlDocument:
        self.flush()
        return self.doc


def _scan_start_tag(src: str, pos: int):
    """Parse a start tag beginning at ``src[pos] == '<'``.

    Returns (tag, attrs, self_closing, end_pos) or None when the tag is never
    terminated.
    """
    n = len(src)
    i = pos + 1
    j = i
    while j < n and not src[j].isspace() and src[j] not in "/>":
        j += 1
    tag = src[i:j].lower()
    i = j
    attrs: dict[str, Optional[str]] = {}
    self_closing = False
    while True:
        while i < n and src[i].isspace():
            i += 1
        if i >= n:
            return None
        ch = src[i]
        if ch == ">":
            return tag, attrs, self_closing, i + 1
        if ch == "/":
            self_closing = src.startswith("/>", i)
            i += 1
            continue
        self_closing = False
        j = i + 1
        while j < n and not src[j].isspace() and src[j] not in "/>=":
            j += 1
        name = src[i:j].lower()
        i = j
        while i < n and src[i].isspace():
            i += 1
        value: Optional[str] = None
        if i < n and src[i] == "=":
            i += 1
            while i < n and src[i].isspace():
                i += 1
            if i >= n:
                return None
            if src[i] in "\"'":
                close = src.find(src[i], i + 1)
                if close < 0:
                    return None
                value = src[i + 1 : close]
                i = close + 1
            else:
                j = i
                while j < n and not src[j].isspace() and src[j] != ">":
                    j += 1
                value = src[i:j]
                i = j
        attrs.setdefault(name, value)


def parse_html(source: str | bytes, source_url: Optional[str] = None) -> HtmlDocument:
    """Parse HTML text into a tree; malformed markup never raises.

    Unclosed elements are closed when an enclosing element closes or at end of
    input; unmatched end tags are ignored.  ``bytes`` input must be UTF-8.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    builder = _TreeBuilder(source_url)
    src = source
    n = len(src)
    pos = 0
    while pos < n:
        lt = src.find("<", pos)
        if lt < 0:
            builder.text(src[pos:])
            break
        builder.text(src[pos:lt])
        pos = lt
        if src.startswith("<!--", pos):
            close = src.find("-->", pos + 4)
            pos = n if close < 0 else close + 3
            continue
        nxt = src[pos + 1 : pos + 2]
        if nxt in ("!", "?"):
            close = src.find(">", pos)
            pos = n if close < 0 else close + 1
            continue
        if nxt == "/" and _is_tag_start(src[pos + 2 : pos + 3]):
            close = src.find(">", pos)
            if close < 0:
                # unterminated tag at end of input is dropped
                break
            name = src[pos + 2 : close].split(None, 1)[0].rstrip("/").lower()
            builder.end(name)
            pos = close + 1
            continue
        if _is_tag_start(nxt):
            scanned = _scan_start_tag(src, pos)
            if scanned is None:
                break
            tag, attrs, self_closing, pos = scanned
            builder.start(tag, attrs, self_closing)
            if tag in RAW_TEXT_TAGS and not self_closing:
                close = re.compile("</" + re.escape(tag), re.IGNORECASE).search(src, pos)
                end = n if close is None else close.start()
                builder.text(src[pos:end])
                pos = end
            continue
        builder.text("<")
        pos += 1
    return builder.finish()


# ---------------------------------------------------------------------------
# serialization


def _format_attr(name: str, value: Optional[str]) -> str:
    if value is None:
        return name
    if '"' not in value:
        return f'{name}="{value}"'
    if "'" not in value:
        return f"{name}='{value}'"
    return '{}="{}"'.format(name, value.replace('"', "&quot;"))


def _open_tag(node: HtmlNode, serialize_refs: bool) -> str:
    parts = [node.tag]
    for name, value in node.attributes.items():
        if serialize_refs and name == REF_ATTR:
            continue
        parts.append(_format_attr(name, value))
    if serialize_refs and node.ref is not None:
        parts.append(_format_attr(REF_ATTR, str(node.ref)))
    return "<" + " ".join(parts) + ">"


def serialize_with_offsets(
    doc: HtmlDocument, serialize_refs: bool = False, start: Optional[NodeId] = None
) -> tuple[str, dict[NodeId, int]]:
    """Serialize and report the character offset where each node starts."""
    out: list[str] = []
    offsets: dict[NodeId, int] = {}
    length = 0
    nodes = doc.nodes
    # (node_id, closing) pairs; closing entries emit end tags
    stack: list[tuple[NodeId, bool]] = [(doc.root if start is None else start, False)]
    while stack:
        node_id, closing = stack.pop()
        node = nodes[node_id]
        if closing:
            piece = f"</{node.tag}>"
        else:
            offsets[node_id] = length
            if node.is_text:
                piece = node.text
            elif node.kind is NodeKind.DOCUMENT:
                piece = ""
                stack.extend((c, False) for c in reversed(node.children))
            else:
                piece = _open_tag(node, serialize_refs)
                if node.tag not in VOID_TAGS:
                    stack.append((node_id, True))
                    stack.extend((c, False) for c in reversed(node.children))
        out.append(piece)
        length += len(piece)
    return "".join(out), offsets


def serialize(doc: HtmlDocument, serialize_refs: bool = False) -> str:
    """Emit raw HTML text with element, attribute and text order preserved."""
    return serialize_with_offsets(doc, serialize_refs)[0]


def strip_closing_tags(doc: HtmlDocument) -> str:
    """Serialize with every closing tag removed, keeping open tags and text in document order."""
    parts = []
    for node_id in doc.iter_subtree():
        node = doc.nodes[node_id]
        if node.is_text:
            parts.append(node.text)
        elif node.is_element:
            parts.append(_open_tag(node, False))
    return "".join(parts)


# ---------------------------------------------------------------------------
# refs, markers and lookup


def assign_refs(doc: HtmlDocument) -> HtmlDocument:
    """Number every element 1..E in pre-order; returns a new document."""
    out = doc.copy()
    for ref, node_id in enumerate(out.elements(), start=1):
        out.nodes[node_id].ref = ref
    return out


def _has_marker(node: HtmlNode) -> bool:
    # the marker is the bare form; target="_blank" on links is ordinary markup
    return TARGET_ATTR in node.attributes and node.attributes[TARGET_ATTR] is None


def mark_target(doc: HtmlDocument, salient: NodeId) -> HtmlDocument:
    """Return a copy where ``salient`` is the only element with a bare ``target`` attribute."""
    out = doc.copy()
    out.element(salient)
    for node_id in out.elements():
        if _has_marker(out.nodes[node_id]):
            del out.nodes[node_id].attributes[TARGET_ATTR]
    out.nodes[salient].attributes[TARGET_ATTR] = None
    return out


def find_targets(doc: HtmlDocument) -> list[NodeId]:
    return [i for i in doc.elements() if _has_marker(doc.nodes[i])]


def find_target(doc: HtmlDocument) -> Optional[NodeId]:
    found = find_targets(doc)
    return found[0] if found else None


def find_by_attr(doc: HtmlDocument, key: str, value: str) -> list[NodeId]:
    return [
        node_id
        for node_id in doc.elements()
        if key in doc.nodes[node_id].attributes and doc.nodes[node_id].attributes[key] == value
    ]


def find_by_tag(doc: HtmlDocument, tag: str) -> list[NodeId]:
    return [i for i in doc.elements() if doc.nodes[i].tag == tag]
