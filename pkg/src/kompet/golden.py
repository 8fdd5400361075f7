"""Paths to the bundled synthetic golden dataset (corpus, taxonomy, gold labels)."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def golden_dir() -> Path:
    return Path(str(files("kompet").joinpath("data/golden")))


def corpus_path() -> Path:
    return golden_dir() / "corpus.jsonl"


def taxonomy_path() -> Path:
    return golden_dir() / "taxonomy.jsonl"


def gold_path() -> Path:
    return golden_dir() / "gold.jsonl"
