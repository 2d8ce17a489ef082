"""Synthetic MiniWoB-style websites with scripted oracles.

Each oracle reads only what a model would see: the action history, the
instruction and the page HTML with ``ref`` attributes.
"""

from __future__ import annotations

import random
import re
import string
from typing import Optional, Sequence

from ..codec import Action
from ..dom import HtmlDocument, NodeId, find_by_tag, parse_html
from .env import EnvState, TaskInstance, TaskSpec, register_task

WORDS = (
    "apple amber basil cedar delta ember fjord grove harbor indigo jasper koala lemon maple "
    "nectar olive pepper quartz raven sierra tulip umber violet willow xenon yarrow zephyr "
    "anchor bramble copper dune falcon garnet hazel iris juniper kelp lotus meadow nova "
    "orchid pebble quill river saffron thistle"
).split()

NAMES = "lyda kasey marcus ana lenore tyrell dina ozzie brynn caleb".split()


def _ref(doc: HtmlDocument, node_id: NodeId) -> int:
    return int(doc.nodes[node_id].attributes["ref"])


def _password(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(4))


def _submitted_text(state: EnvState) -> Optional[str]:
    node = state.node_by_ref(state.submitted)
    if node is None:
        return None
    node_id = state.doc.by_ref(state.submitted)
    return state.doc.text_content(node_id).strip()


def _button_by_text(doc: HtmlDocument, text: str) -> Optional[NodeId]:
    for node_id in find_by_tag(doc, "button"):
        if doc.text_content(node_id).strip() == text:
            return node_id
    return None


def _value_of(doc: HtmlDocument, element_id: str) -> Optional[str]:
    for node_id in doc.elements():
        node = doc.nodes[node_id]
        if node.attributes.get("id") == element_id:
            return node.attributes.get("value")
    return None


def _node_by_id(doc: HtmlDocument, element_id: str) -> Optional[NodeId]:
    for node_id in doc.elements():
        if doc.nodes[node_id].attributes.get("id") == element_id:
            return node_id
    return None


# ---------------------------------------------------------------------------
# click-button


def _click_button_page(rng: random.Random) -> TaskInstance:
    labels = rng.sample(WORDS, rng.randint(2, 5))
    target = rng.choice(labels)
    instruction = f'Click on the "{target}" button.'
    buttons = "".join(f"<button>{w}</button>" for w in labels)
    html = f'<div id="wrap"><div id="query">{instruction}</div><div id="area">{buttons}</div></div>'

    def success(state: EnvState) -> bool:
        return _submitted_text(state) == target

    return TaskInstance(parse_html(html), instruction, success, {"target": target})


def _click_button_oracle(history: Sequence[Action], instruction: str, doc: HtmlDocument) -> Action:
    target = re.search(r'Click on the "(.+)" button', instruction).group(1)
    return Action.click(_ref(doc, _button_by_text(doc, target)))


CLICK_BUTTON = register_task(TaskSpec("click-button", _click_button_page, 3, _click_button_oracle))


# ---------------------------------------------------------------------------
# click-checkboxes


def _checkbox_state(doc: HtmlDocument) -> dict[str, NodeId]:
    """Label text -> checkbox node."""
    out = {}
    for label in find_by_tag(doc, "label"):
        boxes = [c for c in doc.nodes[label].children if doc.nodes[c].tag == "input"]
        if boxes:
            out[doc.text_content(label).strip()] = boxes[0]
    return out


def _click_checkboxes_page(rng: random.Random) -> TaskInstance:
    words = rng.sample(WORDS, rng.randint(3, 6))
    initially = {w for w in words if rng.random() < 0.3}
    targets = sorted(rng.sample(words, rng.randint(0, len(words))), key=words.index)
    if targets:
        instruction = f"Select {', '.join(targets)} and click Submit."
    else:
        instruction = "Select nothing and click Submit."
    boxes = "".join(
        f'<label><input type="checkbox" id="ch{i}"{" checked" if w in initially else ""}>{w}</label><br>'
        for i, w in enumerate(words)
    )
    html = (
        f'<div id="wrap"><div id="query">{instruction}</div>'
        f'<div id="area"><div id="boxes">{boxes}</div><button id="subbtn">Submit</button></div></div>'
    )

    def success(state: EnvState) -> bool:
        if _submitted_text(state) != "Submit":
            return False
        boxes = _checkbox_state(state.doc)
        checked = {w for w, node_id in boxes.items() if "checked" in state.doc.nodes[node_id].attributes}
        return checked == set(targets)

    return TaskInstance(parse_html(html), instruction, success, {"targets": targets})


def _click_checkboxes_oracle(history: Sequence[Action], instruction: str, doc: HtmlDocument) -> Action:
    match = re.search(r"Select (.*) and click Submit", instruction)
    wanted = set() if match.group(1) == "nothing" else set(match.group(1).split(", "))
    for word, node_id in _checkbox_state(doc).items():
        if ("checked" in doc.nodes[node_id].attributes) != (word in wanted):
            return Action.click(_ref(doc, node_id))
    return Action.click(_ref(doc, _button_by_text(doc, "Submit")))


CLICK_CHECKBOXES = register_task(
    TaskSpec("click-checkboxes", _click_checkboxes_page, 15, _click_checkboxes_oracle)
)


# ---------------------------------------------------------------------------
# enter-text


def _enter_text_page(rng: random.Random) -> TaskInstance:
    word = rng.choice(WORDS + NAMES)
    instruction = f'Type "{word}" in the text box and press Submit.'
    html = (
        f'<div id="wrap"><div id="query">{instruction}</div><div id="area">'
        '<input type="text" id="tt"><button id="subbtn">Submit</button></div></div>'
    )

    def success(state: EnvState) -> bool:
        return _submitted_text(state) == "Submit" and _value_of(state.doc, "tt") == word

    return TaskInstance(parse_html(html), instruction, success, {"text": word})


def _enter_text_oracle(history: Sequence[Action], instruction: str, doc: HtmlDocument) -> Action:
    word = re.search(r'Type "(.*)" in the text box', instruction).group(1)
    box = _node_by_id(doc, "tt")
    if doc.nodes[box].attributes.get("value") != word:
        return Action.type(_ref(doc, box), word)
    return Action.click(_ref(doc, _button_by_text(doc, "Submit")))


ENTER_TEXT = register_task(TaskSpec("enter-text", _enter_text_page, 4, _enter_text_oracle))


# ---------------------------------------------------------------------------
# login-user


def _login_user_page(rng: random.Random) -> TaskInstance:
    username = rng.choice(NAMES)
    password = _password(rng)
    instruction = (
        f'Enter the username "{username}" and the password "{password}" '
        "into the text fields and press login."
    )
    html = (
        f'<div id="wrap"><div id="query">{instruction}</div><div id="area"><div id="form">'
        '<p><label class="bold">Username</label><input type="text" id="username"></p>'
        '<p><label class="bold">Password</label><input type="password" id="password"></p>'
        '<button class="secondary-action">Login</button></div></div></div>'
    )

    def success(state: EnvState) -> bool:
        return (
            _submitted_text(state) == "Login"
            and _value_of(state.doc, "username") == username
            and _value_of(state.doc, "password") == password
        )

    return TaskInstance(
        parse_html(html), instruction, success, {"username": username, "password": password}
    )


def _login_user_oracle(history: Sequence[Action], instruction: str, doc: HtmlDocument) -> Action:
    match = re.search(r'username "(.*)" and the password "(.*)" into', instruction)
    for element_id, wanted in zip(("username", "password"), match.groups()):
        node_id = _node_by_id(doc, element_id)
        if doc.nodes[node_id].attributes.get("value") != wanted:
            return Action.type(_ref(doc, node_id), wanted)
    return Action.click(_ref(doc, _button_by_text(doc, "Login")))


LOGIN_USER = register_task(TaskSpec("login-user", _login_user_page, 6, _login_user_oracle))


# ---------------------------------------------------------------------------
# multi-layouts: a form whose fields, order, markup and button change per seed

FIELDS = (
    ("first name", "text"),
    ("last name", "text"),
    ("email", "email"),
    ("username", "text"),
    ("password", "password"),
    ("phone", "tel"),
)
BUTTONS = ("Submit", "Send", "Continue", "Register")


def _field_value(rng: random.Random, name: str) -> str:
    if name == "email":
        return f"{rng.choice(NAMES)}@{rng.choice(WORDS)}.com"
    if name == "password":
        return _password(rng)
    if name == "phone":
        return "".join(rng.choice(string.digits) for _ in range(7))
    return rng.choice(NAMES + WORDS)


def _multi_layouts_page(rng: random.Random) -> TaskInstance:
    fields = rng.sample(FIELDS, rng.randint(2, 4))
    values = {name: _field_value(rng, name) for name, _ in fields}
    layout = rng.choice(("div", "table", "list"))
    labelled = rng.random() < 0.5
    button, decoy = rng.sample(BUTTONS, 2)
    rows = []
    for i, (name, kind) in enumerate(fields):
        element_id = f"f{i}"
        if labelled:
            label = f'<label for="{element_id}">{name.capitalize()}</label>'
            box = f'<input type="{kind}" id="{element_id}">'
        else:
            label = ""
            box = f'<input type="{kind}" id="{element_id}" placeholder="{name}">'
        if layout == "table":
            rows.append(f"<tr><td>{label}</td><td>{box}</td></tr>")
        elif layout == "list":
            rows.append(f"<li>{label}{box}</li>")
        else:
            rows.append(f'<div class="row">{label}{box}</div>')
    body = "".join(rows)
    if layout == "table":
        body = f"<table><tbody>{body}</tbody></table>"
    elif layout == "list":
        body = f"<ul>{body}</ul>"
    controls = [f"<button>{button}</button>", f"<button>{decoy}</button>"]
    rng.shuffle(controls)
    parts = ", ".join(f'"{values[name]}" as the {name}' for name, _ in fields)
    instruction = f"Enter {parts} and press {button}."
    html = (
        f'<div id="wrap"><div id="query">{instruction}</div><div id="area"><form>'
        f"{body}{''.join(controls)}</form></div></div>"
    )
    ids = {name: f"f{i}" for i, (name, _) in enumerate(fields)}

    def success(state: EnvState) -> bool:
        if _submitted_text(state) != button:
            return False
        return all(_value_of(state.doc, ids[name]) == value for name, value in values.items())

    return TaskInstance(
        parse_html(html), instruction, success, {"values": values, "button": button, "layout": layout}
    )


def _field_inputs(doc: HtmlDocument) -> dict[str, NodeId]:
    """Field name (lower-case) -> input, via label[for] or placeholder."""
    out = {}
    by_id = {doc.nodes[i].attributes.get("id"): i for i in find_by_tag(doc, "input")}
    for label in find_by_tag(doc, "label"):
        target = by_id.get(doc.nodes[label].attributes.get("for"))
        if target is not None:
            out[doc.text_content(label).strip().lower()] = target
    for node_id in find_by_tag(doc, "input"):
        placeholder = doc.nodes[node_id].attributes.get("placeholder")
        if placeholder:
            out[placeholder.lower()] = node_id
    return out


def _multi_layouts_oracle(history: Sequence[Action], instruction: str, doc: HtmlDocument) -> Action:
    pairs = re.findall(r'"([^"]*)" as the ([a-z ]+?)(?=,| and press)', instruction)
    button = re.search(r"and press (\w+)\.$", instruction).group(1)
    inputs = _field_inputs(doc)
    for value, name in pairs:
        node_id = inputs[name]
        if doc.nodes[node_id].attributes.get("value") != value:
            return Action.type(_ref(doc, node_id), value)
    return Action.click(_ref(doc, _button_by_text(doc, button)))


MULTI_LAYOUTS = register_task(
    TaskSpec("multi-layouts", _multi_layouts_page, 11, _multi_layouts_oracle)
)

SHIPPED_TASKS = (CLICK_BUTTON, CLICK_CHECKBOXES, ENTER_TEXT, LOGIN_USER, MULTI_LAYOUTS)
