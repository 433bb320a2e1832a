import os

import pytest

from app.modules.errors import ConfigError
from app.modules.settings import Settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ("TOL_1D", "TOL_2D", "N_ALPHA", "CFL", "LOG_LEVEL", "WORKERS"):
        monkeypatch.delenv(f"HJB_HOMOG_{name}", raising=False)


def test_defaults():
    settings = Settings.load()
    assert settings.tol_for(1) == 1e-9
    assert settings.tol_for(2) == 1e-7
    assert settings.as_dict()["n_alpha"] == 41


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HJB_HOMOG_TOL_2D", "1e-8")
    monkeypatch.setenv("HJB_HOMOG_N_ALPHA", "81")
    monkeypatch.setenv("HJB_HOMOG_LOG_LEVEL", "debug")
    settings = Settings.load()
    assert settings.tol_2d == 1e-8
    assert settings.n_alpha == 81
    assert settings.log_level == "debug"


def test_dotenv_file_is_read(monkeypatch, tmp_path):
    monkeypatch.setattr(os, "environ", dict(os.environ))
    (tmp_path / ".env").write_text("HJB_HOMOG_WORKERS=3\n", encoding="utf-8")
    assert Settings.load().workers == 3


@pytest.mark.parametrize(
    "name, value",
    [("TOL_1D", "abc"), ("TOL_1D", "-1"), ("CFL", "1.5"), ("N_ALPHA", "1"), ("LOG_LEVEL", "chatty")],
)
def test_invalid_values_raise_config_error(monkeypatch, name, value):
    monkeypatch.setenv(f"HJB_HOMOG_{name}", value)
    with pytest.raises(ConfigError):
        Settings.load()
