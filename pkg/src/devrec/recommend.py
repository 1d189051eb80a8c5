"""Query-less, ontology-driven browsing recommendations plus a baseline classifier.

Recommendation scores are pure interest overlap (no query, no cosine); a
profile without interests falls back to recency, which needs no ratings and
therefore sidesteps the cold-start problem. Artifacts the user already gave
feedback on are excluded to keep the browse feed fresh.
"""

from collections import defaultdict

from .errors import NoTrainingData, UnknownLabeledId, ZeroVector
from .index import (
    InvertedIndex,
    RankedResult,
    TOP_INTERESTS_USED,
    TermVector,
    artifact_vector,
    cosine,
    doc_vectors,
    interest_overlap,
)
from .ingest import Artifact
from .ontology import Ontology
from .profile import UserProfile, top_interests


def recommend(
    profile: UserProfile,
    index: InvertedIndex,
    ontology: Ontology | None = None,
    k: int = 10,
) -> list[RankedResult]:
    """Rank the corpus for browsing: interest overlap, or recency on cold start."""
    ontology = ontology or index.ontology
    interests = top_interests(profile, TOP_INTERESTS_USED)
    candidates = [
        doc_id for doc_id in index.artifacts if doc_id not in profile.seen_artifacts
    ]
    if interests:
        scored = sorted(
            (
                (
                    interest_overlap(
                        index.doc_concepts.get(doc_id, ()), interests, ontology
                    ),
                    doc_id,
                )
                for doc_id in candidates
            ),
            key=lambda sd: (
                -sd[0],
                -index.artifacts[sd[1]].created_at.timestamp(),
                sd[1],
            ),
        )
        return [
            RankedResult(
                artifact_id=doc_id,
                cosine=0.0,
                interest_overlap=score,
                final_score=score,
                matched_terms=frozenset(),
            )
            for score, doc_id in scored[:k]
        ]
    # cold start: knowledge-free recency ranking
    ordered = sorted(
        candidates,
        key=lambda doc_id: (-index.artifacts[doc_id].created_at.timestamp(), doc_id),
    )
    return [
        RankedResult(
            artifact_id=doc_id,
            cosine=0.0,
            interest_overlap=0.0,
            final_score=0.0,
            matched_terms=frozenset(),
        )
        for doc_id in ordered[:k]
    ]


def classify_artifact(
    artifact: Artifact,
    index: InvertedIndex,
    labeled: list[tuple[str, str]],
) -> tuple[str, float]:
    """Nearest-centroid classification over TF-IDF vectors.

    Per-label centroids are the arithmetic mean of the labeled documents'
    vectors; ties (including the all-zero case) resolve to the
    lexicographically first label.
    """
    if not labeled:
        raise NoTrainingData("no labeled examples given")
    for doc_id, _ in labeled:
        if doc_id not in index.artifacts:
            raise UnknownLabeledId(f"labeled id {doc_id!r} is not in the index")

    by_label: dict[str, list[str]] = defaultdict(list)
    for doc_id, label in labeled:
        by_label[label].append(doc_id)

    vectors = doc_vectors(index, [doc_id for doc_id, _ in labeled])
    centroids: dict[str, TermVector] = {}
    for label, ids in by_label.items():
        sums: dict[str, float] = {}
        for doc_id in ids:
            for term, weight in vectors[doc_id].weights.items():
                sums[term] = sums.get(term, 0.0) + weight
        centroids[label] = TermVector.from_weights(
            {term: total / len(ids) for term, total in sums.items()}
        )

    target = artifact_vector(index, artifact)
    best_label, best_score = None, -1.0
    for label in sorted(centroids):
        centroid = centroids[label]
        try:
            score = cosine(target, centroid)
        except ZeroVector:
            score = 0.0
        if score > best_score:
            best_label, best_score = label, score
    assert best_label is not None
    return best_label, max(0.0, best_score)
