from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def default_rules_path() -> Path:
    return REPO_ROOT / "rules" / "default.fkb"


@pytest.fixture(scope="session")
def nine_rules_trace_path() -> Path:
    return REPO_ROOT / "traces" / "nine_rules.jsonl"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return REPO_ROOT / "fixtures"
