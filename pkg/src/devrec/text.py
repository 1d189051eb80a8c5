"""Canonical text analysis shared by indexing, query expansion and ontology matching.

Every component that compares text against text must go through
:func:`tokenize` so that surface forms, query terms and index terms live in
the same token space.
"""

import re

# Fixed English stop-word list, versioned here. Changing it is a breaking
# change for every persisted index.
STOPWORDS = frozenset(
    """
    a an and are as at be but by for from has have had if in into is it its
    of on or that the their then there these they this to was we were will
    with you your not no nor so than too very can could should would do does
    did done just about over under again once both each our out up down
    """.split()
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

MIN_TOKEN_LEN = 2


def tokenize(text: str) -> list[str]:
    """Casefold, split on non-alphanumerics, drop short tokens and stop words.

    Deterministic and case-insensitive: tokenize(s.upper()) == tokenize(s).
    casefold rather than lower so one-to-many case mappings (for example the
    German sharp s) stay stable. No stemming is applied; unifying
    near-duplicate word forms is the job of query expansion, not the analyzer.
    """
    return [
        tok
        for tok in _TOKEN_RE.findall(text.casefold())
        if len(tok) >= MIN_TOKEN_LEN and tok not in STOPWORDS
    ]
