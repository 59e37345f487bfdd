"""Python access to the hwb toolkit: documents, criterion checks, evaluation and the CLI."""

import json
from importlib import resources
from pathlib import Path

from ._hwb import Document, HwbError, run, scenario_names
from ._hwb import builtin_corpus_dir as _builtin_corpus_dir
from ._hwb import suite_paper as _suite_paper

__all__ = [
    "Document",
    "HwbError",
    "cli",
    "corpus_dir",
    "run",
    "scenario_names",
    "schema",
    "suite_paper",
]


def corpus_dir() -> str:
    """The corpus shipped with the package, else the one the module was built against."""
    packaged = Path(__file__).with_name("corpus")
    return str(packaged) if packaged.is_dir() else _builtin_corpus_dir()


def schema() -> dict:
    """The JSON schema every command output validates against."""
    return json.loads(resources.files(__package__).joinpath("hwb-1.schema.json").read_text())


def cli(*args: str):
    """Runs a command with JSON output; returns (exit code, parsed output or None, stderr)."""
    argv = list(args)
    if "--format" not in argv:
        argv += ["--format", "json"]
    code, out, err = run(argv)
    return code, (json.loads(out) if out.strip() else None), err


def suite_paper(only=None, corpus=None):
    return _suite_paper(corpus or corpus_dir(), only)
