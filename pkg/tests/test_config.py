"""Language configuration loading and lookup."""

import json

import pytest

from smt_forge.config import (
    DuplicateLabel,
    FileUnreadable,
    InvalidPolicy,
    LanguageConfigSet,
    MalformedConfig,
    load_config,
    parse_config,
)

FULL_ENTRY = {
    "name": "Z3",
    "label": "z3",
    "highlight": "clojure",
    "showLineNumbers": True,
    "buildConfig": {
        "timeoutMs": 30000,
        "runnerCommand": ["python3", "-m", "smt_forge.refsolver"],
        "versionCommand": ["python3", "-m", "smt_forge.refsolver", "--version"],
    },
    "discussUrl": "https://github.com/Z3Prover/z3/discussions",
}


def write(tmp_path, data):
    path = tmp_path / "languages.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_load_full_config(tmp_path):
    config_set = load_config(write(tmp_path, [FULL_ENTRY]))
    assert len(config_set) == 1
    config = config_set.lookup("z3")
    assert config.name == "Z3"
    assert config.highlight == "clojure"
    assert config.show_line_numbers is True
    assert config.build_config.timeout_ms == 30000
    assert config.build_config.runner_command[0] == "python3"
    assert not config.read_only


def test_empty_config_is_valid(tmp_path):
    config_set = load_config(write(tmp_path, []))
    assert len(config_set) == 0
    assert config_set.lookup("z3") is None


def test_duplicate_label_rejected(tmp_path):
    second = dict(FULL_ENTRY)
    second["name"] = "Other"
    with pytest.raises(DuplicateLabel) as exc:
        load_config(write(tmp_path, [FULL_ENTRY, second]))
    assert exc.value.label == "z3"


def test_lookup_is_case_sensitive(tmp_path):
    config_set = load_config(write(tmp_path, [FULL_ENTRY]))
    assert config_set.lookup("Z3") is None
    assert config_set.lookup("z3") is not None


def test_lookup_round_trips_every_label(tmp_path):
    dafny = {"name": "Dafny", "label": "dafny", "highlight": "dafny",
             "showLineNumbers": False}
    config_set = load_config(write(tmp_path, [FULL_ENTRY, dafny]))
    for config in config_set:
        assert config_set.lookup(config.label) == config
    assert config_set.lookup("dafny").read_only


def test_missing_build_config_means_read_only(tmp_path):
    entry = {k: v for k, v in FULL_ENTRY.items() if k != "buildConfig"}
    config = load_config(write(tmp_path, [entry])).lookup("z3")
    assert config.read_only
    assert config.build_config is None


def test_unknown_keys_rejected(tmp_path):
    entry = dict(FULL_ENTRY, timout=3)  # typo a teacher could make
    with pytest.raises(MalformedConfig):
        load_config(write(tmp_path, [entry]))


def test_unknown_policy_keys_rejected(tmp_path):
    entry = dict(FULL_ENTRY)
    entry["buildConfig"] = dict(entry["buildConfig"], timout=3)
    with pytest.raises(MalformedConfig):
        load_config(write(tmp_path, [entry]))


def test_nonpositive_timeout_rejected(tmp_path):
    entry = dict(FULL_ENTRY)
    entry["buildConfig"] = dict(entry["buildConfig"], timeoutMs=0)
    with pytest.raises(InvalidPolicy) as exc:
        load_config(write(tmp_path, [entry]))
    assert exc.value.field == "timeoutMs"


def test_empty_runner_command_rejected(tmp_path):
    entry = dict(FULL_ENTRY)
    entry["buildConfig"] = dict(entry["buildConfig"], runnerCommand=[])
    with pytest.raises(InvalidPolicy) as exc:
        load_config(write(tmp_path, [entry]))
    assert exc.value.field == "runnerCommand"


def test_missing_policy_field_rejected(tmp_path):
    entry = dict(FULL_ENTRY)
    entry["buildConfig"] = {"timeoutMs": 1000}
    with pytest.raises(InvalidPolicy):
        load_config(write(tmp_path, [entry]))


def test_bad_label_rejected(tmp_path):
    with pytest.raises(MalformedConfig):
        load_config(write(tmp_path, [dict(FULL_ENTRY, label="Z3!")]))


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "languages.json"
    path.write_text('[{"name": "Z3",]', encoding="utf-8")
    with pytest.raises(MalformedConfig) as exc:
        load_config(path)
    assert "line 1" in exc.value.position


def test_unreadable_file(tmp_path):
    with pytest.raises(FileUnreadable):
        load_config(tmp_path / "missing.json")


def test_deterministic_parse():
    text = json.dumps([FULL_ENTRY])
    assert parse_config(text) == parse_config(text)


def test_config_set_is_hashable_frozen():
    config_set = parse_config(json.dumps([FULL_ENTRY]))
    with pytest.raises(Exception):
        config_set.configs = ()


def test_relative_discuss_url_rejected(tmp_path):
    with pytest.raises(MalformedConfig):
        load_config(write(tmp_path, [dict(FULL_ENTRY, discussUrl="/forum")]))
