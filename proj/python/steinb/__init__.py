"""Stein-operator variance bounds: Python access to the C++ core."""

import json
import os

from . import _core
from ._core import SteinError

__all__ = ["SteinError", "builtin_scenarios", "run", "table", "table_row_ids"]


def _to_jsonl(scenarios):
    if isinstance(scenarios, (str, os.PathLike)):
        with open(scenarios, encoding="utf-8") as fh:
            return fh.read()
    return "".join(json.dumps(s) + "\n" for s in scenarios)


def builtin_scenarios():
    """The built-in scenarios as scenario-file dictionaries."""
    return [json.loads(line) for line in _core.builtin_jsonl().splitlines()]


def run(scenarios, *, tol=None, jobs=1, identity_only=False):
    """Run scenarios given as dictionaries or a JSONL path; returns report dictionaries sorted by id.

    Infinite values are encoded as the strings "inf" and "-inf", as in the CLI output.
    """
    return json.loads(_core.run(_to_jsonl(scenarios), tol, jobs, identity_only))


def table(tol=None):
    """The worked-example table as {"rows": [...], "all_pass": bool}."""
    return json.loads(_core.table(tol))


def table_row_ids():
    return list(_core.table_row_ids())
