"""Service configuration: a key=value text file with packaged defaults."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    grammar_path: str | None = None     # None: packaged grammar
    corpus_path: str | None = None      # None: packaged corpus
    weights_path: str | None = None     # None: packaged weights
    transit_ticks: int = 3
    max_props: int = 24
    listen: str = "127.0.0.1:8000"
    persist_dir: str | None = None

    def __post_init__(self):
        if self.transit_ticks < 1:
            raise ConfigError("transit_ticks must be >= 1")
        if self.max_props < 2:
            raise ConfigError("max_props must be >= 2")
        for label, path in (("grammar", self.grammar_path),
                            ("corpus", self.corpus_path),
                            ("weights", self.weights_path)):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} path {path!r} is not readable")

    def grammar_text(self) -> str:
        if self.grammar_path:
            return Path(self.grammar_path).read_text("utf-8")
        return resources.files("gr1chat.data").joinpath("grammar.txt").read_text("utf-8")

    def corpus_text(self) -> str:
        if self.corpus_path:
            return Path(self.corpus_path).read_text("utf-8")
        return resources.files("gr1chat.data").joinpath("corpus.tsv").read_text("utf-8")

    def weights_text(self) -> str:
        if self.weights_path:
            return Path(self.weights_path).read_text("utf-8")
        return resources.files("gr1chat.data").joinpath("weights.tsv").read_text("utf-8")


_KEYS = {
    "grammar": str, "corpus": str, "weights": str,
    "transit_ticks": int, "max_props": int, "listen": str, "persist_dir": str,
}


def parse_config(text: str) -> Config:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _KEYS[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key!r}") from None
    return Config(
        grammar_path=values.get("grammar"),
        corpus_path=values.get("corpus"),
        weights_path=values.get("weights"),
        transit_ticks=values.get("transit_ticks", 3),
        max_props=values.get("max_props", 24),
        listen=values.get("listen", "127.0.0.1:8000"),
        persist_dir=values.get("persist_dir"),
    )


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    return parse_config(Path(path).read_text("utf-8"))
