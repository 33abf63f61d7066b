import os
from pathlib import Path

import hypothesis
import pytest

from irateplc.model import parse_model
from irateplc.stakeholder import parse_stakeholder_config
from utils.settings import Settings

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.register_profile("ci", deadline=None, max_examples=1000)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def webportal():
    return parse_model((FIXTURES / "webportal.fm").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def scenario(webportal):
    return [
        parse_stakeholder_config(path.read_text(encoding="utf-8"), webportal)
        for path in sorted((FIXTURES / "scenario").glob("*.txt"))
    ]


@pytest.fixture(scope="session")
def tie_model():
    return parse_model((FIXTURES / "tie.fm").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def tie_configs(tie_model):
    return [
        parse_stakeholder_config(path.read_text(encoding="utf-8"), tie_model)
        for path in sorted((FIXTURES / "tie").glob("*.txt"))
    ]


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in ("IRATEPLC_MAX_ITERS", "IRATEPLC_DEFAULT_RULE", "IRATEPLC_LOG_LEVEL", "IRATEPLC_HTTP_TIMEOUT"):
        monkeypatch.delenv(name, raising=False)
    Settings().reload()
    yield
    Settings().reload()
