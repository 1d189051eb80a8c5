"""HTTP delivery layer: search, recommendation, feedback and profile endpoints.

Single-process FastAPI app. The index and ontology are shared read-only;
profile mutations are serialized per user id. Search and recommendation
never mutate the index; the only index write path is POST /artifact, which
must be enabled explicitly with allow_ingest.
"""

import threading
from collections import defaultdict
from dataclasses import dataclass

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import qexp
from .errors import (
    DevRecError,
    DuplicateUser,
    StoreUnavailable,
    UnknownArtifact,
    UnknownConcept,
    UnknownUser,
)
from .index import DEFAULT_BETA, DEFAULT_TAU, InvertedIndex, load_index, search
from .ingest import Artifact, format_timestamp, parse_timestamp, utcnow
from .ontology import annotate
from .profile import (
    DEFAULT_HALF_LIFE_DAYS,
    FeedbackEvent,
    ProfileStore,
    UserProfile,
    apply_decay,
    create_profile,
    ingest_posts,
    record_feedback,
    top_interests,
)
from .recommend import recommend

_STATUS_BY_ERROR = {
    UnknownUser: 404,
    UnknownArtifact: 404,
    UnknownConcept: 404,
    DuplicateUser: 409,
    StoreUnavailable: 503,
}


@dataclass
class ServiceConfig:
    index_path: str
    profiles_path: str
    ontology_path: str | None = None
    lexicon_path: str | None = None
    allow_ingest: bool = False
    half_life_days: float = DEFAULT_HALF_LIFE_DAYS


def _result_payload(index: InvertedIndex, results) -> list[dict]:
    rows = []
    for rank, result in enumerate(results, 1):
        artifact = index.artifacts.get(result.artifact_id)
        rows.append(
            {
                "rank": rank,
                "artifact_id": result.artifact_id,
                "title": artifact.title if artifact else "",
                "kind": artifact.kind if artifact else "",
                "url": artifact.url if artifact else None,
                "created_at": format_timestamp(artifact.created_at) if artifact else None,
                "final_score": result.final_score,
                "cosine": result.cosine,
                "interest_overlap": result.interest_overlap,
                "matched_terms": sorted(result.matched_terms),
                "concepts": sorted(index.doc_concepts.get(result.artifact_id, ())),
            }
        )
    return rows


def _interests_payload(profile: UserProfile) -> dict:
    return {
        concept: {
            "weight": iw.weight,
            "last_updated": format_timestamp(iw.last_updated),
        }
        for concept, iw in sorted(profile.interests.items())
    }


def create_app(config: ServiceConfig) -> FastAPI:
    """Load every artifact up front and expose the endpoint table.

    Startup fails fast with a named cause when any input file is missing or
    invalid.
    """
    index = load_index(config.index_path)
    if config.ontology_path:
        from .ontology import load_ontology

        index.ontology = load_ontology(config.ontology_path)
    lexicon = (
        qexp.load_lexicon(config.lexicon_path)
        if config.lexicon_path
        else qexp.EMPTY_LEXICON
    )
    store = ProfileStore(config.profiles_path)

    app = FastAPI(title="devrec", version="0.1.0")
    # the web UI is served statically from another origin; ids are opaque
    # pseudonymous tokens and no credentials exist, so open CORS is fine here
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.index = index
    app.state.lexicon = lexicon
    app.state.store = store
    app.state.config = config

    user_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    locks_guard = threading.Lock()

    def user_lock(user_id: str) -> threading.Lock:
        with locks_guard:
            return user_locks[user_id]

    @app.exception_handler(DevRecError)
    async def devrec_error_handler(request: Request, exc: DevRecError):
        status = next(
            (code for etype, code in _STATUS_BY_ERROR.items() if isinstance(exc, etype)),
            400,
        )
        return JSONResponse(
            status_code=status, content={"error": exc.code, "detail": str(exc)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "indexed": index.N}

    @app.get("/search")
    def search_endpoint(
        q: str,
        user: str | None = None,
        k: int = Query(default=10, ge=1),
        beta: float = Query(default=DEFAULT_BETA, ge=0.0),
        strict: bool = False,
        tau: float = DEFAULT_TAU,
        expand: bool = True,
    ):
        profile = store.load(user) if user else None
        if expand:
            eq = qexp.expand(q, lexicon, index.ontology)
        else:
            eq = qexp.no_expansion(q)
        results = search(index, eq, profile=profile, k=k, beta=beta, strict=strict, tau=tau)
        return {
            "request": {
                "q": q,
                "user": user,
                "k": k,
                "beta": beta,
                "strict": strict,
                "tau": tau,
                "expand": expand,
                "original_terms": sorted(eq.original_terms),
                "expansion_terms": {
                    term: weight
                    for term, weight in eq.terms.items()
                    if term not in eq.original_terms
                },
            },
            "results": _result_payload(index, results),
        }

    @app.get("/recommend")
    def recommend_endpoint(user: str, k: int = Query(default=10, ge=1)):
        profile = store.load(user)
        results = recommend(profile, index, index.ontology, k=k)
        interests = top_interests(profile, 10)
        rows = _result_payload(index, results)
        for row in rows:
            row["best_interest"] = _best_interest(
                index, row["artifact_id"], interests
            )
        return {
            "request": {"user": user, "k": k, "cold_start": not interests},
            "results": rows,
        }

    def _best_interest(index, artifact_id, interests):
        from .ontology import concept_similarity

        ontology = index.ontology
        if ontology is None or not interests:
            return None
        best, best_value = None, 0.0
        for concept, weight in interests:
            if concept not in ontology:
                continue
            for doc_concept in index.doc_concepts.get(artifact_id, ()):
                if doc_concept not in ontology:
                    continue
                value = weight * concept_similarity(concept, doc_concept, ontology)
                if value > best_value:
                    best, best_value = concept, value
        return best

    @app.get("/profile/{user_id}")
    def get_profile(user_id: str):
        profile = store.load(user_id)
        doc = profile.to_dict()
        doc["top_interests"] = [
            {"concept": concept, "weight": weight}
            for concept, weight in top_interests(profile, 10)
        ]
        return doc

    @app.post("/profile", status_code=201)
    def post_profile(form: dict = Body(...)):
        profile = create_profile(form, utcnow())
        with user_lock(profile.user_id):
            store.create(profile)
        return {"created": profile.user_id}

    @app.post("/profile/{user_id}/decay")
    def decay_profile(
        user_id: str,
        now: str | None = None,
        dry_run: bool = Query(default=False),
        half_life_days: float | None = None,
    ):
        at = parse_timestamp(now) if now else utcnow()
        half_life = half_life_days or config.half_life_days
        with user_lock(user_id):
            profile = store.load(user_id)
            decayed = apply_decay(profile, at, half_life)
            if not dry_run:
                store.save(decayed)
        return {
            "request": {
                "user": user_id,
                "now": format_timestamp(at),
                "half_life_days": half_life,
                "dry_run": dry_run,
            },
            "dry_run": dry_run,
            "interests": _interests_payload(decayed),
        }

    @app.post("/feedback")
    def post_feedback(body: dict = Body(...)):
        user_id = str(body.get("user", ""))
        artifact_id = str(body.get("artifact", ""))
        signal = str(body.get("signal", ""))
        event = FeedbackEvent(
            user_id=user_id, artifact_id=artifact_id, signal=signal, at=utcnow()
        )
        with user_lock(user_id):
            profile = store.load(user_id)
            updated = record_feedback(
                profile, event, index.artifacts, config.half_life_days
            )
            store.save(updated)
        return {
            "request": {"user": user_id, "artifact": artifact_id, "signal": signal},
            "interests": _interests_payload(updated),
        }

    @app.post("/posts/{user_id}")
    def post_posts(user_id: str, body: dict = Body(...)):
        raw_posts = body.get("posts", [])
        now = utcnow()
        posts = []
        for position, raw in enumerate(raw_posts):
            created = (
                parse_timestamp(raw["created_at"]) if raw.get("created_at") else now
            )
            posts.append(
                Artifact(
                    id=f"osn:{user_id}:{position}",
                    kind="post",
                    title=str(raw.get("title", "")),
                    body=str(raw.get("body", "")),
                    url=None,
                    source="osn",
                    created_at=created,
                )
            )
        with user_lock(user_id):
            profile = store.load(user_id)
            if index.ontology is None:
                updated = apply_decay(profile, now, config.half_life_days)
            else:
                updated = ingest_posts(
                    profile, posts, index.ontology, now, config.half_life_days
                )
            store.save(updated)
        return {
            "request": {"user": user_id, "posts": len(posts)},
            "interests": _interests_payload(updated),
        }

    @app.get("/artifact/{artifact_id}")
    def get_artifact(artifact_id: str):
        artifact = index.artifacts.get(artifact_id)
        if artifact is None:
            raise UnknownArtifact(f"unknown artifact {artifact_id!r}")
        return artifact.to_dict()

    @app.post("/artifact", status_code=201)
    def post_artifact(body: dict = Body(...)):
        if not config.allow_ingest:
            return JSONResponse(
                status_code=403,
                content={
                    "error": "ingest_disabled",
                    "detail": "start the service with --allow-ingest to add artifacts",
                },
            )
        artifact = Artifact.from_dict(body)
        if index.ontology is not None:
            artifact = annotate(artifact, index.ontology)
        indexed = index.add_document(artifact)
        return {"indexed": artifact.id, "tokenized": indexed, "total": index.N}

    return app


def run_service(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8080):
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")
