"""Exact code-clone analysis of Q&A post corpora."""

import json

from ._clonescope import (  # noqa: F401
    Analysis,
    NormalizedSnippet,
    ParseError,
    analyze,
    extract_code_blocks,
    fingerprint,
    fingerprint_hex,
    fnv1a64,
    nloc,
    normalize,
    parse_posts,
    process_block,
    project_alnum,
)
from ._clonescope import extract_links as _extract_links


def extract_links(body, format="markdown", rules_path=""):
    """Classified links found outside code, as dicts."""
    return [json.loads(s) for s in _extract_links(body, format, rules_path)]


def summary(analysis):
    return json.loads(analysis.summary_json())


def clone_set(analysis, key):
    return json.loads(analysis.clone_set_json(key))
