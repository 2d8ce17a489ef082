from __future__ import annotations

import json

import pytest

from htmltasks.config import ToolkitConfig, load_config
from htmltasks.snippet import SnippetConfig


def test_defaults():
    cfg = load_config(env={})
    assert cfg.snippet_config() == SnippetConfig(25.0, 3)
    assert cfg.distill_config().max_per_description == 10
    assert cfg.vocabulary is None
    assert cfg.effective_jobs() >= 1
    with pytest.raises(ValueError):
        cfg.endpoint()
    assert cfg.endpoint("http://m").base_url == "http://m"


def test_file_then_env(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"snippet": {"max_height": 5}, "model": {"base_url": "http://file"}, "jobs": 2}))
    cfg = load_config(path, env={})
    assert cfg.snippet.max_height == 5 and cfg.jobs == 2
    assert cfg.endpoint().base_url == "http://file"
    env = {
        "HTMLTASKS_SNIPPET_MAX_HEIGHT": "7",
        "HTMLTASKS_SNIPPET_MAX_NEW_DESCENDANTS_PCT": "50",
        "HTMLTASKS_DISTILL_DROP_SINGLE_TEXT": "false",
        "HTMLTASKS_DISTILL_LABEL_TAG_POOL": "div, span",
        "HTMLTASKS_MODEL_BASE_URL": "http://env",
        "HTMLTASKS_JOBS": "3",
        "HTMLTASKS_API_KEY": "ignored here",
        "UNRELATED": "x",
    }
    cfg = load_config(path, env=env)
    assert cfg.snippet_config() == SnippetConfig(50.0, 7)
    assert cfg.distill.drop_single_text is False
    assert cfg.distill_config().label_tag_pool == ("div", "span")
    assert cfg.endpoint().base_url == "http://env"
    assert cfg.jobs == 3


def test_unknown_keys(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"snipet": {}}))
    with pytest.raises(ValueError):
        load_config(path, env={})
    path.write_text(json.dumps({"snippet": {"height": 3}}))
    with pytest.raises(ValueError):
        load_config(path, env={})


def test_round_trip_dict():
    cfg = ToolkitConfig()
    assert cfg.to_dict()["snippet"] == {"max_new_descendants_pct": 25.0, "max_height": 3}
