import msgspec
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks.errors import (FieldRanksError, GuardExceeded, InconclusiveEstimate, InequalityViolation,
                               TensorFormatError, VerificationFailed, check_budget)
from fieldranks.settings import DEFAULT_SETTINGS, Settings, all_cores, load_settings


def test_defaults():
    assert DEFAULT_SETTINGS.budget == 2 ** 34
    assert DEFAULT_SETTINGS.workers == 1, "library calls are single-process unless asked otherwise"
    assert (DEFAULT_SETTINGS.slice_max_dim, DEFAULT_SETTINGS.slice_max_field) == (4, 3)
    assert all_cores() >= 1


def test_settings_are_frozen():
    with pytest.raises(AttributeError):
        DEFAULT_SETTINGS.budget = 1


def test_load_settings(tmp_path):
    assert load_settings() == DEFAULT_SETTINGS
    path = tmp_path / "settings.toml"
    path.write_text("budget = 1000\nslice_max_dim = 3\n", encoding="utf-8")
    settings = load_settings(path, workers=4, budget=None)
    assert settings == Settings(budget=1000, slice_max_dim=3, workers=4), "None overrides are ignored"


def test_load_settings_rejects_bad_values(tmp_path):
    path = tmp_path / "settings.toml"
    path.write_text("budget = \"lots\"\n", encoding="utf-8")
    with pytest.raises(msgspec.ValidationError):
        load_settings(path)


def test_exit_codes():
    assert TensorFormatError("x").exit_code == 1
    assert GuardExceeded("points", 10, 5).exit_code == 2
    assert VerificationFailed("x").exit_code == 3
    assert InconclusiveEstimate("x").exit_code == 3
    assert InequalityViolation("x").exit_code == 4
    assert all(issubclass(cls, FieldRanksError) for cls in
               (TensorFormatError, GuardExceeded, VerificationFailed, InconclusiveEstimate, InequalityViolation))


def test_check_budget():
    check_budget("points", 5, 5)
    with pytest.raises(GuardExceeded) as info:
        check_budget("points", 6, 5)
    assert (info.value.what, info.value.needed, info.value.allowed) == ("points", 6, 5)
    assert "needs 6" in str(info.value)


def test_violation_keeps_its_dump():
    assert InequalityViolation("x").dump == {}
    assert InequalityViolation("x", {"check": "restriction"}).dump == {"check": "restriction"}
