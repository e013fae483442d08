"""Strong backdoors into scattered constraint classes.

Reports are plain dicts following the JSON schema returned by `schema()`.
"""

import json

from . import _core
from ._core import Document, Error, ParseError, parse, read

__all__ = [
    "Document", "Error", "ParseError", "parse", "read", "detect", "verify", "solve", "count",
    "oracle_count", "oracle_decide", "oracle_detect", "generate", "schema",
]


def detect(doc, k, langs=(), *, closure=True, mode="instance-derived", threads=1, exhaustive=False):
    return json.loads(_core.detect(doc, k, list(langs), closure, mode, threads, exhaustive))


def verify(doc, backdoor, langs=(), *, closure=True):
    return json.loads(_core.verify(doc, list(backdoor), list(langs), closure))


def solve(doc, k=None, *, backdoor=None, langs=(), closure=True):
    return json.loads(_core.solve(doc, k, None if backdoor is None else list(backdoor), list(langs), closure))


def count(doc, k=None, *, backdoor=None, langs=(), closure=True):
    return json.loads(_core.count(doc, k, None if backdoor is None else list(backdoor), list(langs), closure))


def oracle_count(doc):
    return int(_core.oracle_count(doc))


oracle_decide = _core.oracle_decide
oracle_detect = _core.oracle_detect


def generate(seed=1, *, blocks=2, block_vars=10, block_cons=12, bridges=1, noise_unaries=0,
             langs=("@horn3", "@dualhorn3")):
    return parse(_core.generate(seed, blocks, block_vars, block_cons, bridges, noise_unaries, list(langs)))


def schema():
    return json.loads(_core.schema())
