"""Inverted index and TF-IDF vector-space retrieval with interest boosting.

Term weights use tf * ln(1 + N/df): strictly positive for every indexed
term, smooth in N/df and easy to recompute by hand. Changing the scheme
breaks every golden test and persisted score, so it is pinned here.

Title tokens count twice toward tf; body-only counting is available via
build_index(title_weight=1).
"""

import json
import math
import struct
import threading
import zlib
from bisect import bisect_left, insort
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import scoring
from .errors import DuplicateArtifactId, ParseError, ZeroVector
from .ingest import Artifact
from .ontology import Ontology, concept_similarity, ontology_from_dict
from .profile import UserProfile, top_interests
from .qexp import ExpandedQuery
from .text import tokenize

DEFAULT_BETA = 0.5
DEFAULT_TAU = 0.25
DEFAULT_TITLE_WEIGHT = 2
TOP_INTERESTS_USED = 10

_MAGIC = b"DVRECIDX"
_VERSION = 1


@dataclass(frozen=True)
class TermVector:
    """Sparse non-negative term weights; zero entries are never stored."""

    weights: Mapping[str, float]

    @classmethod
    def from_weights(cls, weights: Mapping[str, float]) -> "TermVector":
        return cls({term: w for term, w in weights.items() if w != 0.0})

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))


@dataclass(frozen=True)
class RankedResult:
    artifact_id: str
    cosine: float
    interest_overlap: float
    final_score: float
    matched_terms: frozenset[str]


class InvertedIndex:
    """Postings, document frequencies and corpus statistics for retrieval.

    Norms and the dense scoring arrays are derived data, recomputed lazily
    after mutations. Document addition takes the writer lock; readers see
    either the pre- or post-add state.
    """

    def __init__(self, ontology: Ontology | None = None, title_weight: int = DEFAULT_TITLE_WEIGHT):
        self.postings: dict[str, list[tuple[str, int]]] = {}
        self.df: dict[str, int] = {}
        self.N: int = 0
        self.doc_concepts: dict[str, frozenset[str]] = {}
        self.artifacts: dict[str, Artifact] = {}
        self.skipped_empty: int = 0
        self.ontology = ontology
        self.title_weight = title_weight
        self._seen_ids: set[str] = set()
        self._norms: dict[str, float] | None = None
        self._dense: tuple | None = None
        self._write_lock = threading.RLock()

    # -- construction -----------------------------------------------------

    def _term_counts(self, artifact: Artifact) -> Counter:
        counts: Counter = Counter()
        for tok in tokenize(artifact.title):
            counts[tok] += self.title_weight
        for tok in tokenize(artifact.body):
            counts[tok] += 1
        return counts

    def add_document(self, artifact: Artifact) -> bool:
        """Index one artifact; returns False when it held zero tokens.

        Same counting as build_index, exposed for the service's ingestion
        path. Affected postings lists are replaced, not mutated in place, so
        a concurrent search that captured its snapshot earlier keeps a
        consistent pre-add view.
        """
        with self._write_lock:
            if artifact.id in self._seen_ids:
                raise DuplicateArtifactId(f"duplicate artifact id {artifact.id!r}")
            self._seen_ids.add(artifact.id)
            counts = self._term_counts(artifact)
            if not counts:
                self.skipped_empty += 1
                return False
            for term, tf in counts.items():
                plist = list(self.postings.get(term, ()))
                insort(plist, (artifact.id, tf))
                self.postings[term] = plist
                self.df[term] = len(plist)
            self.N += 1
            self.doc_concepts[artifact.id] = frozenset(artifact.concepts)
            self.artifacts[artifact.id] = artifact
            self._norms = None
            self._dense = None
            return True

    # -- derived statistics ------------------------------------------------

    def idf(self, term: str) -> float:
        """ln(1 + N/df); positive for every indexed term."""
        return math.log(1.0 + self.N / self.df[term])

    def doc_norms(self) -> dict[str, float]:
        """Euclidean norms of the document TF-IDF vectors (cached)."""
        with self._write_lock:
            if self._norms is None:
                acc: dict[str, float] = {doc_id: 0.0 for doc_id in self.artifacts}
                for term, plist in self.postings.items():
                    term_idf = self.idf(term)
                    for doc_id, tf in plist:
                        weight = tf * term_idf
                        acc[doc_id] += weight * weight
                self._norms = {doc_id: math.sqrt(v) for doc_id, v in acc.items()}
            return self._norms

    def _dense_arrays(self):
        """Doc-id <-> dense-index mapping, per-term int32/float64 arrays and
        the norm vector aligned with the sorted id order."""
        with self._write_lock:
            return self._dense_arrays_locked()

    def _dense_arrays_locked(self):
        if self._dense is None:
            import numpy as np

            ids = sorted(self.artifacts)
            id_to_idx = {doc_id: i for i, doc_id in enumerate(ids)}
            term_arrays = {}
            for term, plist in self.postings.items():
                docs = np.fromiter(
                    (id_to_idx[doc_id] for doc_id, _ in plist),
                    dtype=np.int32,
                    count=len(plist),
                )
                tfs = np.fromiter(
                    (tf for _, tf in plist), dtype=np.float64, count=len(plist)
                )
                term_arrays[term] = (docs, tfs)
            norms = self.doc_norms()
            norms_arr = np.fromiter(
                (norms[doc_id] for doc_id in ids), dtype=np.float64, count=len(ids)
            )
            self._dense = (ids, id_to_idx, term_arrays, norms_arr)
        return self._dense

    def contains_term(self, term: str, doc_id: str) -> bool:
        plist = self.postings.get(term)
        if not plist:
            return False
        pos = bisect_left(plist, (doc_id,))
        return pos < len(plist) and plist[pos][0] == doc_id


def build_index(
    corpus: Iterable[Artifact],
    ontology: Ontology | None = None,
    title_weight: int = DEFAULT_TITLE_WEIGHT,
) -> InvertedIndex:
    """Index an annotated corpus; artifacts with zero tokens are skipped and counted.

    Bulk path over the same counting add_document uses (append, then one
    sort per postings list), producing the identical index.
    """
    index = InvertedIndex(ontology=ontology, title_weight=title_weight)
    postings: dict[str, list[tuple[str, int]]] = {}
    for artifact in corpus:
        if artifact.id in index._seen_ids:
            raise DuplicateArtifactId(f"duplicate artifact id {artifact.id!r}")
        index._seen_ids.add(artifact.id)
        counts = index._term_counts(artifact)
        if not counts:
            index.skipped_empty += 1
            continue
        for term, tf in counts.items():
            postings.setdefault(term, []).append((artifact.id, tf))
        index.N += 1
        index.doc_concepts[artifact.id] = frozenset(artifact.concepts)
        index.artifacts[artifact.id] = artifact
    for term, plist in postings.items():
        plist.sort()
        index.postings[term] = plist
        index.df[term] = len(plist)
    return index


def tf_idf(term: str, tf: int, index: InvertedIndex) -> float:
    """Document-side weight of one term occurrence count."""
    return tf * index.idf(term)


def cosine(a: TermVector, b: TermVector) -> float:
    """Cosine of the angle between two sparse vectors.

    With the non-negative weights used throughout, the value lies in [0, 1];
    disjoint support gives exactly 0.
    """
    norm_a = a.norm()
    norm_b = b.norm()
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine is undefined for zero-norm vectors")
    small, large = (a.weights, b.weights) if len(a.weights) <= len(b.weights) else (b.weights, a.weights)
    dot = 0.0
    for term in sorted(small):
        if term in large:
            dot += small[term] * large[term]
    return min(1.0, dot / (norm_a * norm_b))


def query_vector(index: InvertedIndex, eq: ExpandedQuery) -> TermVector:
    """Query-side TF-IDF weights; terms absent from the index get weight 0."""
    return TermVector.from_weights(
        {
            term: weight * index.idf(term)
            for term, weight in eq.terms.items()
            if term in index.df
        }
    )


def doc_vectors(index: InvertedIndex, ids: Iterable[str]) -> dict[str, TermVector]:
    """TF-IDF vectors for the given documents via one postings scan."""
    wanted = set(ids)
    weights: dict[str, dict[str, float]] = {doc_id: {} for doc_id in wanted}
    for term, plist in index.postings.items():
        term_idf = index.idf(term)
        for doc_id, tf in plist:
            if doc_id in wanted:
                weights[doc_id][term] = tf * term_idf
    return {doc_id: TermVector(w) for doc_id, w in weights.items()}


def artifact_vector(index: InvertedIndex, artifact: Artifact) -> TermVector:
    """TF-IDF vector of an arbitrary artifact using the index statistics."""
    counts: Counter = Counter()
    for tok in tokenize(artifact.title):
        counts[tok] += index.title_weight
    for tok in tokenize(artifact.body):
        counts[tok] += 1
    return TermVector.from_weights(
        {term: tf * index.idf(term) for term, tf in counts.items() if term in index.df}
    )


def interest_overlap(
    doc_concepts: Iterable[str],
    interests: Sequence[tuple[str, float]],
    ontology: Ontology | None,
) -> float:
    """Profile-weighted best concept similarity between doc and interests.

    Interests must be normalized (top_interests output). Concepts unknown to
    the ontology contribute nothing rather than failing: profiles may carry
    concepts from an older ontology revision.
    """
    concepts = [c for c in doc_concepts if ontology is not None and c in ontology]
    if not concepts or not interests or ontology is None:
        return 0.0
    total = 0.0
    for interest_concept, weight in interests:
        if interest_concept not in ontology:
            continue
        best = max(
            concept_similarity(interest_concept, c, ontology) for c in concepts
        )
        total += weight * best
    return total


def _max_interest_similarity(
    doc_concepts: Iterable[str],
    interests: Sequence[tuple[str, float]],
    ontology: Ontology | None,
) -> float:
    if ontology is None:
        return 0.0
    best = 0.0
    for interest_concept, _ in interests:
        if interest_concept not in ontology:
            continue
        for c in doc_concepts:
            if c in ontology:
                best = max(best, concept_similarity(interest_concept, c, ontology))
    return best


def search(
    index: InvertedIndex,
    eq: ExpandedQuery,
    profile: UserProfile | None = None,
    k: int = 10,
    beta: float = DEFAULT_BETA,
    strict: bool = False,
    tau: float = DEFAULT_TAU,
    use_compiled: bool | None = None,
) -> list[RankedResult]:
    """Rank candidates by cosine, filter and boost by interest overlap.

    Candidates are all documents sharing at least one query term. With
    strict=True and a non-empty profile, candidates whose best concept
    similarity to any top interest falls below tau are dropped. The final
    score is cosine * (1 + beta * interest_overlap).
    """
    pick_compiled = scoring.use_compiled() if use_compiled is None else use_compiled

    # capture a consistent snapshot: add_document replaces postings lists and
    # derived caches instead of mutating them, so references taken under the
    # lock stay stable while the accumulation below runs outside it
    with index._write_lock:
        if index.N == 0:
            return []
        # query-side vector component per term is eq_weight * idf; the
        # dot-product contribution per unit tf multiplies the doc idf in again
        query_weights = [
            (term, eq.terms[term] * index.idf(term))
            for term in sorted(eq.terms)
            if term in index.df
        ]
        if not query_weights:
            return []
        query_norm = math.sqrt(sum(c * c for _, c in query_weights))
        coeffs = [(term, qw * index.idf(term)) for term, qw in query_weights]
        norms = index.doc_norms()
        if pick_compiled:
            ids, _, term_arrays, norms_arr = index._dense_arrays_locked()
        plists = {term: index.postings[term] for term, _ in coeffs}

    interests = top_interests(profile, TOP_INTERESTS_USED) if profile else []
    apply_strict = strict and bool(interests)

    if pick_compiled:
        import numpy as np

        doc_arrays = [term_arrays[term][0] for term, _ in coeffs]
        tf_arrays = [term_arrays[term][1] for term, _ in coeffs]
        dense = scoring.accumulate_dense(
            doc_arrays, tf_arrays, [c for _, c in coeffs], len(ids),
            force_compiled=pick_compiled,
        )
        hits = np.flatnonzero(dense)
        if not interests:
            # fully vectorized path; final score == cosine, tie-break is the
            # dense index because ids are sorted ascending
            cos_arr = np.minimum(1.0, dense[hits] / (query_norm * norms_arr[hits]))
            order = np.lexsort((hits, -cos_arr))[:k]
            rows = [
                (float(cos_arr[j]), float(cos_arr[j]), 0.0, ids[hits[j]])
                for j in order
            ]
            return _materialize(index, rows, coeffs)
        dots = {ids[i]: float(dense[i]) for i in hits}
    else:
        dots = scoring.accumulate_sparse(
            (coeff, plists[term]) for term, coeff in coeffs
        )
    scored: list[tuple[float, float, float, str]] = []
    for doc_id, dot in dots.items():
        if apply_strict:
            best_sim = _max_interest_similarity(
                index.doc_concepts.get(doc_id, ()), interests, index.ontology
            )
            if best_sim < tau:
                continue
        cos = min(1.0, dot / (query_norm * norms[doc_id]))
        overlap = (
            interest_overlap(index.doc_concepts.get(doc_id, ()), interests, index.ontology)
            if interests
            else 0.0
        )
        scored.append((cos * (1.0 + beta * overlap), cos, overlap, doc_id))
    scored.sort(key=lambda row: (-row[0], row[3]))
    return _materialize(index, scored[:k], coeffs)


def _materialize(
    index: InvertedIndex,
    rows: list[tuple[float, float, float, str]],
    coeffs: list[tuple[str, float]],
) -> list[RankedResult]:
    """Build RankedResults (with matched terms) for the surviving top rows."""
    return [
        RankedResult(
            artifact_id=doc_id,
            cosine=cos,
            interest_overlap=overlap,
            final_score=final,
            matched_terms=frozenset(
                term for term, _ in coeffs if index.contains_term(term, doc_id)
            ),
        )
        for final, cos, overlap, doc_id in rows
    ]


# -- persistence -----------------------------------------------------------


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Persist the index as a self-describing, version-tagged container."""
    payload = {
        "N": index.N,
        "skipped_empty": index.skipped_empty,
        "title_weight": index.title_weight,
        "postings": {
            term: [[doc_id, tf] for doc_id, tf in plist]
            for term, plist in sorted(index.postings.items())
        },
        "df": dict(sorted(index.df.items())),
        "doc_norms": dict(sorted(index.doc_norms().items())),
        "doc_concepts": {
            doc_id: sorted(concepts)
            for doc_id, concepts in sorted(index.doc_concepts.items())
        },
        "artifacts": {
            doc_id: artifact.to_dict()
            for doc_id, artifact in sorted(index.artifacts.items())
        },
        "ontology": index.ontology.to_dict() if index.ontology else None,
    }
    blob = zlib.compress(json.dumps(payload, ensure_ascii=False).encode("utf-8"), 6)
    with open(path, "wb") as handle:
        handle.write(_MAGIC)
        handle.write(struct.pack("<II", _VERSION, 0))
        handle.write(struct.pack("<Q", len(blob)))
        handle.write(blob)


def load_index(path: str | Path) -> InvertedIndex:
    """Load a persisted index; validates the container magic and version."""
    try:
        with open(path, "rb") as handle:
            magic = handle.read(len(_MAGIC))
            if magic != _MAGIC:
                raise ParseError(f"{path}: not an index container")
            version, _ = struct.unpack("<II", handle.read(8))
            if version != _VERSION:
                raise ParseError(f"{path}: unsupported container version {version}")
            (size,) = struct.unpack("<Q", handle.read(8))
            blob = handle.read(size)
    except OSError as exc:
        raise ParseError(f"cannot read index {path}: {exc}") from exc
    try:
        payload = json.loads(zlib.decompress(blob).decode("utf-8"))
    except (zlib.error, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: corrupt index payload: {exc}") from exc

    ontology = (
        ontology_from_dict(payload["ontology"], source=str(path))
        if payload.get("ontology")
        else None
    )
    index = InvertedIndex(
        ontology=ontology, title_weight=payload.get("title_weight", DEFAULT_TITLE_WEIGHT)
    )
    index.N = payload["N"]
    index.skipped_empty = payload.get("skipped_empty", 0)
    index.postings = {
        term: [(doc_id, tf) for doc_id, tf in plist]
        for term, plist in payload["postings"].items()
    }
    index.df = {term: int(df) for term, df in payload["df"].items()}
    index.doc_concepts = {
        doc_id: frozenset(concepts)
        for doc_id, concepts in payload["doc_concepts"].items()
    }
    index.artifacts = {
        doc_id: Artifact.from_dict(doc) for doc_id, doc in payload["artifacts"].items()
    }
    index._seen_ids = set(index.artifacts)
    index._norms = {doc_id: float(v) for doc_id, v in payload["doc_norms"].items()}
    return index
