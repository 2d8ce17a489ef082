"""Headless simulated websites: state, action application, episode runner."""

from __future__ import annotations

import enum
import json
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from ..codec import (
    Action,
    ActionFunction,
    ActionParseError,
    NavigationStep,
    encode_navigation_input,
    parse_action,
)
from ..dom import HtmlDocument, HtmlNode, assign_refs, serialize


class UnknownTask(KeyError):
    pass


class EpisodeFinished(RuntimeError):
    pass


class Outcome(str, enum.Enum):
    RUNNING = "running"
    SUCCESS = "success"
    FAILURE = "failure"


TEXT_INPUT_TYPES = frozenset(("text", "password", "email", "search", "tel", "url", "number"))


def is_checkbox(node: HtmlNode) -> bool:
    return node.tag == "input" and (node.attributes.get("type") or "").lower() in ("checkbox", "radio")


def is_text_input(node: HtmlNode) -> bool:
    if node.tag == "textarea":
        return True
    return node.tag == "input" and (node.attributes.get("type") or "text").lower() in TEXT_INPUT_TYPES


def is_activator(node: HtmlNode) -> bool:
    """Elements whose click submits, follows a link or ends the episode."""
    if node.tag in ("button", "a"):
        return True
    return node.tag == "input" and (node.attributes.get("type") or "").lower() in ("submit", "button")


@dataclass(frozen=True)
class TaskInstance:
    doc: HtmlDocument
    instruction: str
    success: Callable[["EnvState"], bool]
    goal: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class Transition:
    """Clicking an element that satisfies ``trigger`` replaces the page instead of ending the episode."""

    trigger: Callable[[HtmlNode], bool]
    next_page: Callable[["EnvState", random.Random], HtmlDocument]


@dataclass(frozen=True)
class TaskSpec:
    name: str
    page_generator: Callable[[random.Random], TaskInstance]
    max_steps: int
    oracle: Optional[Callable[[Sequence[Action], str, HtmlDocument], Action]] = None
    transitions: tuple[Transition, ...] = ()


@dataclass(frozen=True)
class EnvState:
    task: TaskSpec
    seed: int
    doc: HtmlDocument
    instruction: str
    action_history: tuple[Action, ...] = ()
    step_count: int = 0
    terminal: Outcome = Outcome.RUNNING
    # ref of the activator whose click ended the episode
    submitted: Optional[int] = None
    instance: Optional[TaskInstance] = None
    page_index: int = 0

    @property
    def html(self) -> str:
        return serialize(self.doc, serialize_refs=True)

    @property
    def running(self) -> bool:
        return self.terminal is Outcome.RUNNING

    def node_by_ref(self, ref: Optional[int]) -> Optional[HtmlNode]:
        if ref is None:
            return None
        node_id = self.doc.by_ref(ref)
        return None if node_id is None else self.doc.nodes[node_id]

    def encode(self) -> str:
        return encode_navigation_input(self.action_history, self.instruction, self.html)


def reset(task: TaskSpec | str, seed: int) -> EnvState:
    if isinstance(task, str):
        task = get_task(task)
    instance = task.page_generator(random.Random(seed))
    return EnvState(task, seed, assign_refs(instance.doc), instance.instruction, instance=instance)


def toggle_checked(node: HtmlNode) -> None:
    # "checked" is always last when present, so a double toggle restores attribute order
    if "checked" in node.attributes:
        del node.attributes["checked"]
    else:
        node.attributes["checked"] = None


def apply_action(doc: HtmlDocument, action: Action) -> tuple[HtmlDocument, Optional[int]]:
    """Apply one action to a page copy.

    Returns the new page and, when an activator was clicked, its ref.  Unknown
    refs and actions that do not fit the element leave the page unchanged.
    """
    node_id = doc.by_ref(action.ref)
    if node_id is None:
        return doc, None
    node = doc.nodes[node_id]
    if action.function is ActionFunction.CLICK:
        if is_checkbox(node):
            out = doc.copy()
            toggle_checked(out.nodes[node_id])
            return out, None
        if is_activator(node):
            return doc, action.ref
        return doc, None
    if is_text_input(node):
        out = doc.copy()
        out.nodes[node_id].attributes["value"] = action.text
        return out, None
    return doc, None


def _finish(state: EnvState, submitted: Optional[int]) -> EnvState:
    success = state.instance.success if state.instance else (lambda s: False)
    if success(state):
        return replace(state, terminal=Outcome.SUCCESS)
    if submitted is not None or state.step_count >= state.task.max_steps:
        return replace(state, terminal=Outcome.FAILURE)
    return state


def step(state: EnvState, action: Action) -> EnvState:
    if not state.running:
        raise EpisodeFinished(f"episode already ended with {state.terminal.value}")
    doc, activated = apply_action(state.doc, action)
    page_index = state.page_index
    if activated is not None:
        node = doc.nodes[doc.by_ref(activated)]
        for transition in state.task.transitions:
            if transition.trigger(node):
                rng = random.Random(f"{state.seed}:{page_index + 1}")
                doc = assign_refs(transition.next_page(state, rng))
                page_index += 1
                activated = None
                break
    new = replace(
        state,
        doc=doc,
        action_history=state.action_history + (action,),
        step_count=state.step_count + 1,
        submitted=activated,
        page_index=page_index,
    )
    return _finish(new, activated)


def skip_step(state: EnvState) -> EnvState:
    """Consume a step without acting, for model outputs that do not parse."""
    if not state.running:
        raise EpisodeFinished(f"episode already ended with {state.terminal.value}")
    return _finish(replace(state, step_count=state.step_count + 1), None)


@dataclass
class EpisodeRecord:
    task: str
    seed: int
    steps: list[NavigationStep]
    outcome: Outcome
    parse_errors: list[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome is Outcome.SUCCESS

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "seed": self.seed,
            "outcome": self.outcome.value,
            "parse_errors": list(self.parse_errors),
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> EpisodeRecord:
        return cls(
            data["task"],
            data["seed"],
            [NavigationStep.from_dict(s) for s in data["steps"]],
            Outcome(data["outcome"]),
            list(data.get("parse_errors", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def run_episode(task: TaskSpec | str, seed: int, policy: Callable[[str], str]) -> EpisodeRecord:
    """Roll out ``policy`` (text in, action record out) until the episode ends.

    Outputs that fail to parse consume a step and are logged by error kind;
    transport errors raised by the policy propagate.
    """
    state = reset(task, seed)
    steps: list[NavigationStep] = []
    errors: list[str] = []
    while state.running:
        html = state.html
        output = policy(encode_navigation_input(state.action_history, state.instruction, html))
        try:
            action = parse_action(output)
        except ActionParseError as exc:
            errors.append(exc.kind)
            state = skip_step(state)
            continue
        steps.append(NavigationStep(list(state.action_history), state.instruction, html, action))
        state = step(state, action)
    return EpisodeRecord(state.task.name, seed, steps, state.terminal, errors)


def success_rate(records: Iterable[EpisodeRecord]) -> float:
    records = list(records)
    if not records:
        raise ValueError("no episodes")
    return 100.0 * sum(r.success for r in records) / len(records)


def parse_error_counts(records: Iterable[EpisodeRecord]) -> Counter:
    return Counter(kind for r in records for kind in r.parse_errors)


def demos_to_training_tuples(
    episodes: Iterable[EpisodeRecord], include_history: bool = True
) -> Iterator[NavigationStep]:
    """One training tuple per demonstrated step; history dropped for the no-history ablation."""
    for episode in episodes:
        for s in episode.steps:
            if include_history:
                yield s
            else:
                yield NavigationStep([], s.instruction, s.html, s.action)


# ---------------------------------------------------------------------------
# registry

_REGISTRY: dict[str, TaskSpec] = {}


def register_task(task: TaskSpec) -> TaskSpec:
    _REGISTRY[task.name] = task
    return task


def get_task(name: str) -> TaskSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownTask(name) from None


def task_names() -> list[str]:
    return list(_REGISTRY)
