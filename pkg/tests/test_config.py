import pytest

from genius.config import Settings, parse_config_text
from genius.errors import ConfigError


def test_parse_flat_key_values():
    text = """
    # comment
    window = 30
    embedder = "hash"
    rules = 'demo/rules.json'

    cors-origin = http://ui.example
    """
    values = parse_config_text(text)
    assert values == {
        "window": "30",
        "embedder": "hash",
        "rules": "demo/rules.json",
        "cors-origin": "http://ui.example",
    }


def test_parse_rejects_bad_lines():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("just some words")
    with pytest.raises(ConfigError, match="empty key"):
        parse_config_text("= value")


def test_flag_beats_env_beats_file(tmp_path, monkeypatch):
    config = tmp_path / "genius.toml"
    config.write_text("window = 15\n", encoding="utf-8")
    settings = Settings(config)
    assert settings.get("window", None, default=30.0, cast=float) == 15.0
    monkeypatch.setenv("GENIUS_WINDOW", "20")
    assert settings.get("window", None, default=30.0, cast=float) == 20.0
    assert settings.get("window", 45.0, default=30.0, cast=float) == 45.0


def test_default_when_unset():
    settings = Settings(None)
    assert settings.get("workers", None, default=1, cast=int) == 1


def test_env_cast_failure(monkeypatch):
    monkeypatch.setenv("GENIUS_WORKERS", "many")
    with pytest.raises(ConfigError, match="GENIUS_WORKERS"):
        Settings(None).get("workers", None, default=1, cast=int)


def test_missing_config_file_is_an_error(tmp_path):
    with pytest.raises(ConfigError):
        Settings(tmp_path / "ghost.toml")


def test_hyphenated_key_env_spelling(monkeypatch):
    monkeypatch.setenv("GENIUS_EMBEDDER_ENDPOINT", "http://models.internal")
    value = Settings(None).get("embedder-endpoint", None)
    assert value == "http://models.internal"
