"""Toolkit configuration: JSON file, ``HTMLTASKS_*`` environment variables, defaults.

Precedence is flags > environment > file > defaults; flags are applied by the CLI.
Environment variables name a section and key, e.g. ``HTMLTASKS_SNIPPET_MAX_HEIGHT=4``.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping, Optional

from .distill import LABEL_TAG_POOL, DistillConfig
from .models import ModelEndpoint
from .snippet import SnippetConfig

ENV_PREFIX = "HTMLTASKS_"


@dataclass
class SnippetSection:
    max_new_descendants_pct: float = 25.0
    max_height: int = 3


@dataclass
class DistillSection:
    max_per_description: int = 10
    label_tag_pool: list = field(default_factory=lambda: list(LABEL_TAG_POOL))
    drop_single_text: bool = True
    rng_seed: int = 0
    balance: str = "earliest"


@dataclass
class ModelSection:
    base_url: Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 3
    max_input_chars: Optional[int] = 8000
    backoff: float = 0.5
    max_in_flight: int = 8


@dataclass
class OutputSection:
    dir: str = "."


@dataclass
class ToolkitConfig:
    snippet: SnippetSection = field(default_factory=SnippetSection)
    distill: DistillSection = field(default_factory=DistillSection)
    model: ModelSection = field(default_factory=ModelSection)
    output: OutputSection = field(default_factory=OutputSection)
    # path to a categories/paraphrases JSON file; None uses the bundled vocabulary
    vocabulary: Optional[str] = None
    # worker processes for distill and run-episodes; None means one per core
    jobs: Optional[int] = None

    def snippet_config(self) -> SnippetConfig:
        return SnippetConfig(self.snippet.max_new_descendants_pct, self.snippet.max_height)

    def distill_config(self) -> DistillConfig:
        d = self.distill
        return DistillConfig(d.max_per_description, tuple(d.label_tag_pool), d.drop_single_text, d.rng_seed, d.balance)

    def endpoint(self, base_url: Optional[str] = None) -> ModelEndpoint:
        m = self.model
        url = base_url or m.base_url
        if not url:
            raise ValueError("no model base_url configured")
        return ModelEndpoint(url, m.timeout, m.max_retries, m.max_input_chars, m.backoff, m.max_in_flight)

    def effective_jobs(self) -> int:
        return self.jobs or os.cpu_count() or 1

    def to_dict(self) -> dict:
        return asdict(self)


def _coerce(raw: str, current):
    if isinstance(current, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, list):
        return [item.strip() for item in raw.split(",") if item.strip()]
    if current is None:
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            return raw
    return raw


def _merge(section, values: Mapping, where: str):
    known = {f.name for f in fields(section)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown keys in {where}: {sorted(unknown)}")
    return replace(section, **values)


def load_config(path=None, env: Optional[Mapping[str, str]] = None) -> ToolkitConfig:
    env = os.environ if env is None else env
    cfg = ToolkitConfig()
    if path is not None:
        data = json.loads(Path(path).read_text("utf-8"))
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            current = getattr(cfg, key)
            if isinstance(value, dict) and hasattr(current, "__dataclass_fields__"):
                setattr(cfg, key, _merge(current, value, key))
            else:
                setattr(cfg, key, value)
    for var, raw in env.items():
        if not var.startswith(ENV_PREFIX) or var == ENV_PREFIX + "API_KEY":
            continue
        rest = var[len(ENV_PREFIX) :].lower()
        for top in fields(cfg):
            section = getattr(cfg, top.name)
            if rest == top.name and not hasattr(section, "__dataclass_fields__"):
                setattr(cfg, top.name, _coerce(raw, section))
                break
            prefix = top.name + "_"
            if rest.startswith(prefix) and hasattr(section, "__dataclass_fields__"):
                key = rest[len(prefix) :]
                if key in {f.name for f in fields(section)}:
                    setattr(cfg, top.name, replace(section, **{key: _coerce(raw, getattr(section, key))}))
                    break
    return cfg
