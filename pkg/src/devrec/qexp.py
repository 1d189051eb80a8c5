"""Automatic query expansion: synset synonyms plus ontology-derived terms.

Expansion is conservative: original tokens always keep weight 1.0 and
expansion tokens enter at a fixed alpha < 1, so expansion can only add
candidate documents, never remove any.
"""

from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyQuery, EmptySynset, ParseError
from .ontology import Ontology, match_instances
from .text import tokenize

DEFAULT_ALPHA = 0.5
DEFAULT_MAX_PER_TERM = 5


@dataclass(frozen=True)
class Synset:
    id: str
    terms: tuple[str, ...]


@dataclass(frozen=True)
class SynsetLexicon:
    synsets: tuple[Synset, ...]
    dedup_warnings: int = 0

    def __len__(self) -> int:
        return len(self.synsets)


@dataclass(frozen=True)
class ExpandedQuery:
    """Weighted query terms; originals at 1.0, expansions at alpha."""

    terms: dict[str, float]
    original_terms: frozenset[str]

    def tokens(self) -> list[str]:
        return list(self.terms)


EMPTY_LEXICON = SynsetLexicon(synsets=())


def load_lexicon(path: str | Path) -> SynsetLexicon:
    """Load a synset lexicon: one `id<TAB>term1|term2|...` line per synset.

    Lines starting with `#` are comments. Terms duplicated within one synset
    (after tokenization-normalization) are dropped and counted as warnings.
    """
    synsets: list[Synset] = []
    warnings = 0
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read lexicon {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" not in stripped:
            raise ParseError(f"{path}:{lineno}: expected `id<TAB>terms`")
        synset_id, _, terms_part = stripped.partition("\t")
        synset_id = synset_id.strip()
        if not synset_id:
            raise ParseError(f"{path}:{lineno}: empty synset id")
        terms: list[str] = []
        seen: set[tuple[str, ...]] = set()
        for term in terms_part.split("|"):
            term = term.strip()
            if not term:
                continue
            key = tuple(tokenize(term))
            if not key:
                continue
            if key in seen:
                warnings += 1
                continue
            seen.add(key)
            terms.append(term)
        if not terms:
            raise EmptySynset(f"{path}:{lineno}: synset {synset_id!r} has no terms")
        synsets.append(Synset(id=synset_id, terms=tuple(terms)))
    return SynsetLexicon(synsets=tuple(synsets), dedup_warnings=warnings)


def _subsequence_start(haystack: list[str], needle: tuple[str, ...]) -> int:
    """Index of the first contiguous occurrence of needle, or -1."""
    n, m = len(haystack), len(needle)
    for i in range(n - m + 1):
        if tuple(haystack[i : i + m]) == needle:
            return i
    return -1


def expand(
    query: str,
    lexicon: SynsetLexicon = EMPTY_LEXICON,
    ontology: Ontology | None = None,
    alpha: float = DEFAULT_ALPHA,
    max_per_term: int = DEFAULT_MAX_PER_TERM,
) -> ExpandedQuery:
    """Expand a query with synset siblings and ontology-derived tokens.

    A synset fires when one of its terms (single- or multi-token) occurs in
    the query token sequence; its sibling terms' tokens join at weight alpha,
    at most max_per_term new tokens per original anchor token, taken in
    lexicon order. A matched ontology instance contributes the tokens of its
    class label and of its other surface forms, also at alpha. Terms reached
    by several routes keep their maximum weight; originals are never
    down-weighted.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if max_per_term < 1:
        raise ValueError(f"max_per_term must be positive, got {max_per_term}")
    query_tokens = tokenize(query)
    if not query_tokens:
        raise EmptyQuery(f"query {query!r} tokenizes to nothing")

    weights: dict[str, float] = {tok: 1.0 for tok in query_tokens}
    originals = frozenset(query_tokens)
    budget: dict[str, int] = {tok: max_per_term for tok in originals}

    def add(token: str, anchor: str | None) -> None:
        if token in originals:
            return
        if token in weights:
            weights[token] = max(weights[token], alpha)
            return
        if anchor is not None:
            if budget.get(anchor, 0) <= 0:
                return
            budget[anchor] -= 1
        weights[token] = alpha

    # synset step, in lexicon order for determinism
    for synset in lexicon.synsets:
        term_keys = [tuple(tokenize(term)) for term in synset.terms]
        matched_anchors: list[str] = []
        for key in term_keys:
            start = _subsequence_start(query_tokens, key)
            if start >= 0:
                matched_anchors.append(query_tokens[start])
        if not matched_anchors:
            continue
        anchor = matched_anchors[0]
        for key in term_keys:
            for token in key:
                add(token, anchor)

    # ontology step: class labels and alternate surface forms of matched instances
    if ontology is not None:
        for match in match_instances(query_tokens, ontology):
            instance = ontology.instances[match.instance_id]
            label = ontology.classes[match.class_id].label
            for token in tokenize(label):
                add(token, None)
            for form in instance.surface_forms:
                for token in tokenize(form):
                    add(token, None)

    ordered = {token: weights[token] for token in sorted(weights)}
    return ExpandedQuery(terms=ordered, original_terms=originals)


def no_expansion(query: str) -> ExpandedQuery:
    """The identity expansion: original tokens only, all at weight 1.0."""
    query_tokens = tokenize(query)
    if not query_tokens:
        raise EmptyQuery(f"query {query!r} tokenizes to nothing")
    return ExpandedQuery(
        terms={tok: 1.0 for tok in sorted(set(query_tokens))},
        original_terms=frozenset(query_tokens),
    )
