"""Eight-dimension, time-aware user profiles with exponentially decaying interests.

All operations are functional: they return a new profile and never mutate the
input. Persistence is one JSON document per user under the store directory;
callers must serialize mutations per user id.
"""

import json
import math
import os
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    ClockSkew,
    DuplicateUser,
    InvalidField,
    StoreUnavailable,
    UnknownArtifact,
    UnknownUser,
)
from .ingest import Artifact, format_timestamp, parse_timestamp, utcnow
from .ontology import Ontology, annotate

DEFAULT_HALF_LIFE_DAYS = 30.0
PRUNE_THRESHOLD = 1e-4
POST_INCREMENT = 1.0
RELEVANT_INCREMENT = 1.0
NOT_RELEVANT_DECREMENT = 0.5

APP_METHODS = ("native", "hybrid", "cross")

_USER_ID_RE = re.compile(r"^[A-Za-z0-9_.@-]+$")


@dataclass(frozen=True)
class InterestWeight:
    weight: float
    last_updated: datetime


@dataclass(frozen=True)
class Personal:
    age: int | None = None
    location: str | None = None
    job_title: str | None = None
    years_experience: int | None = None
    social_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class DomainOfInterest:
    dev_domains: frozenset[str] = frozenset()
    app_methods: frozenset[str] = frozenset()
    methodologies: frozenset[str] = frozenset()
    repo_hosts: frozenset[str] = frozenset()
    languages: frozenset[str] = frozenset()
    ides: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SoftwareProject:
    requirements: tuple[str, ...] = ()
    modeling: frozenset[str] = frozenset()
    paradigm: frozenset[str] = frozenset()
    frontend_tools: frozenset[str] = frozenset()
    backend_tools: frozenset[str] = frozenset()


@dataclass(frozen=True)
class DevEnvironment:
    infrastructure: frozenset[str] = frozenset()
    backend_servers: frozenset[str] = frozenset()
    testing_tools: frozenset[str] = frozenset()
    debugging_tools: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Security:
    pseudonymous: bool = True  # identity stays undisclosed; never False
    share_social: bool = False


@dataclass(frozen=True)
class Delivery:
    default_k: int = 10
    strict_filter: bool = False


@dataclass(frozen=True)
class Quality:
    last_eval: Mapping[str, float] | None = None


@dataclass(frozen=True)
class FeedbackEvent:
    user_id: str
    artifact_id: str
    signal: str  # "relevant" | "not_relevant"
    at: datetime


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    personal: Personal = Personal()
    domain_of_interest: DomainOfInterest = DomainOfInterest()
    software_project: SoftwareProject = SoftwareProject()
    dev_environment: DevEnvironment = DevEnvironment()
    security: Security = Security()
    interests: Mapping[str, InterestWeight] = field(default_factory=dict)
    delivery: Delivery = Delivery()
    quality: Quality = Quality()
    seen_artifacts: frozenset[str] = frozenset()
    updated_at: datetime = field(default_factory=utcnow)

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "personal": {
                "age": self.personal.age,
                "location": self.personal.location,
                "job_title": self.personal.job_title,
                "years_experience": self.personal.years_experience,
                "social_ids": list(self.personal.social_ids),
            },
            "domain_of_interest": {
                "dev_domains": sorted(self.domain_of_interest.dev_domains),
                "app_methods": sorted(self.domain_of_interest.app_methods),
                "methodologies": sorted(self.domain_of_interest.methodologies),
                "repo_hosts": sorted(self.domain_of_interest.repo_hosts),
                "languages": sorted(self.domain_of_interest.languages),
                "ides": sorted(self.domain_of_interest.ides),
            },
            "software_project": {
                "requirements": list(self.software_project.requirements),
                "modeling": sorted(self.software_project.modeling),
                "paradigm": sorted(self.software_project.paradigm),
                "frontend_tools": sorted(self.software_project.frontend_tools),
                "backend_tools": sorted(self.software_project.backend_tools),
            },
            "dev_environment": {
                "infrastructure": sorted(self.dev_environment.infrastructure),
                "backend_servers": sorted(self.dev_environment.backend_servers),
                "testing_tools": sorted(self.dev_environment.testing_tools),
                "debugging_tools": sorted(self.dev_environment.debugging_tools),
            },
            "security": {
                "pseudonymous": self.security.pseudonymous,
                "share_social": self.security.share_social,
            },
            "interests": {
                concept: {
                    "weight": iw.weight,
                    "last_updated": format_timestamp(iw.last_updated),
                }
                for concept, iw in sorted(self.interests.items())
            },
            "delivery": {
                "default_k": self.delivery.default_k,
                "strict_filter": self.delivery.strict_filter,
            },
            "quality": {
                "last_eval": dict(self.quality.last_eval)
                if self.quality.last_eval is not None
                else None
            },
            "seen_artifacts": sorted(self.seen_artifacts),
            "updated_at": format_timestamp(self.updated_at),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "UserProfile":
        personal = doc.get("personal", {})
        doi = doc.get("domain_of_interest", {})
        project = doc.get("software_project", {})
        env = doc.get("dev_environment", {})
        security = doc.get("security", {})
        delivery = doc.get("delivery", {})
        quality = doc.get("quality", {})
        return cls(
            user_id=doc["user_id"],
            personal=Personal(
                age=personal.get("age"),
                location=personal.get("location"),
                job_title=personal.get("job_title"),
                years_experience=personal.get("years_experience"),
                social_ids=tuple(personal.get("social_ids", ())),
            ),
            domain_of_interest=DomainOfInterest(
                dev_domains=frozenset(doi.get("dev_domains", ())),
                app_methods=frozenset(doi.get("app_methods", ())),
                methodologies=frozenset(doi.get("methodologies", ())),
                repo_hosts=frozenset(doi.get("repo_hosts", ())),
                languages=frozenset(doi.get("languages", ())),
                ides=frozenset(doi.get("ides", ())),
            ),
            software_project=SoftwareProject(
                requirements=tuple(project.get("requirements", ())),
                modeling=frozenset(project.get("modeling", ())),
                paradigm=frozenset(project.get("paradigm", ())),
                frontend_tools=frozenset(project.get("frontend_tools", ())),
                backend_tools=frozenset(project.get("backend_tools", ())),
            ),
            dev_environment=DevEnvironment(
                infrastructure=frozenset(env.get("infrastructure", ())),
                backend_servers=frozenset(env.get("backend_servers", ())),
                testing_tools=frozenset(env.get("testing_tools", ())),
                debugging_tools=frozenset(env.get("debugging_tools", ())),
            ),
            security=Security(
                pseudonymous=True,
                share_social=bool(security.get("share_social", False)),
            ),
            interests={
                concept: InterestWeight(
                    weight=float(iw["weight"]),
                    last_updated=parse_timestamp(iw["last_updated"]),
                )
                for concept, iw in doc.get("interests", {}).items()
            },
            delivery=Delivery(
                default_k=int(delivery.get("default_k", 10)),
                strict_filter=bool(delivery.get("strict_filter", False)),
            ),
            quality=Quality(last_eval=quality.get("last_eval")),
            seen_artifacts=frozenset(doc.get("seen_artifacts", ())),
            updated_at=parse_timestamp(doc["updated_at"]),
        )


def _require_non_negative(value, name: str) -> int | None:
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise InvalidField(f"{name} must be a non-negative integer, got {value!r}")
    return value


def create_profile(form: dict, now: datetime | None = None) -> UserProfile:
    """Build a profile from the explicit-form document.

    Declared interest concepts are seeded at weight 1.0; every undeclared
    dimension stays empty (non-disclosure is tolerated by design).
    """
    now = now or utcnow()
    user_id = str(form.get("user_id", "")).strip()
    if not user_id:
        raise InvalidField("user_id must be non-empty")
    if not _USER_ID_RE.match(user_id):
        raise InvalidField(f"user_id {user_id!r} contains unsupported characters")

    personal = form.get("personal", {})
    doi = form.get("domain_of_interest", {})
    app_methods = frozenset(doi.get("app_methods", ()))
    bad_methods = app_methods - set(APP_METHODS)
    if bad_methods:
        raise InvalidField(f"unknown app methods: {sorted(bad_methods)}")

    project = form.get("software_project", {})
    env = form.get("dev_environment", {})
    delivery = form.get("delivery", {})
    default_k = int(delivery.get("default_k", 10))
    if default_k < 1:
        raise InvalidField("delivery.default_k must be positive")

    interests = {
        str(concept): InterestWeight(weight=1.0, last_updated=now)
        for concept in form.get("interest_concepts", ())
    }

    return UserProfile(
        user_id=user_id,
        personal=Personal(
            age=_require_non_negative(personal.get("age"), "age"),
            location=personal.get("location"),
            job_title=personal.get("job_title"),
            years_experience=_require_non_negative(
                personal.get("years_experience"), "years_experience"
            ),
            social_ids=tuple(personal.get("social_ids", ())),
        ),
        domain_of_interest=DomainOfInterest(
            dev_domains=frozenset(doi.get("dev_domains", ())),
            app_methods=app_methods,
            methodologies=frozenset(doi.get("methodologies", ())),
            repo_hosts=frozenset(doi.get("repo_hosts", ())),
            languages=frozenset(doi.get("languages", ())),
            ides=frozenset(doi.get("ides", ())),
        ),
        software_project=SoftwareProject(
            requirements=tuple(project.get("requirements", ())),
            modeling=frozenset(project.get("modeling", ())),
            paradigm=frozenset(project.get("paradigm", ())),
            frontend_tools=frozenset(project.get("frontend_tools", ())),
            backend_tools=frozenset(project.get("backend_tools", ())),
        ),
        dev_environment=DevEnvironment(
            infrastructure=frozenset(env.get("infrastructure", ())),
            backend_servers=frozenset(env.get("backend_servers", ())),
            testing_tools=frozenset(env.get("testing_tools", ())),
            debugging_tools=frozenset(env.get("debugging_tools", ())),
        ),
        security=Security(
            pseudonymous=True, share_social=bool(form.get("share_social", False))
        ),
        interests=interests,
        delivery=Delivery(
            default_k=default_k,
            strict_filter=bool(delivery.get("strict_filter", False)),
        ),
        updated_at=now,
    )


def apply_decay(
    profile: UserProfile,
    now: datetime,
    half_life_days: float = DEFAULT_HALF_LIFE_DAYS,
) -> UserProfile:
    """Halve every interest weight per half_life_days of inactivity.

    Each weight w becomes w * 2**(-age_days / half_life_days) and its
    last_updated moves to `now`; weights below PRUNE_THRESHOLD are dropped.
    """
    if half_life_days <= 0:
        raise InvalidField(f"half_life_days must be positive, got {half_life_days}")
    interests: dict[str, InterestWeight] = {}
    for concept, iw in profile.interests.items():
        if now < iw.last_updated:
            raise ClockSkew(
                f"decay time {format_timestamp(now)} precedes last update of "
                f"{concept!r} ({format_timestamp(iw.last_updated)})"
            )
        age_days = (now - iw.last_updated).total_seconds() / 86400.0
        weight = iw.weight * math.pow(2.0, -age_days / half_life_days)
        if weight >= PRUNE_THRESHOLD:
            interests[concept] = InterestWeight(weight=weight, last_updated=now)
    return replace(
        profile, interests=interests, updated_at=max(profile.updated_at, now)
    )


def _bump(
    interests: dict[str, InterestWeight], concept: str, delta: float, now: datetime
) -> None:
    current = interests.get(concept)
    weight = max(0.0, (current.weight if current else 0.0) + delta)
    if weight > 0.0:
        interests[concept] = InterestWeight(weight=weight, last_updated=now)
    elif concept in interests:
        del interests[concept]


def ingest_posts(
    profile: UserProfile,
    posts: Iterable[Artifact],
    ontology: Ontology,
    now: datetime,
    half_life_days: float = DEFAULT_HALF_LIFE_DAYS,
) -> UserProfile:
    """Implicit profiling: decay, then +1.0 per distinct concept of each post."""
    decayed = apply_decay(profile, now, half_life_days)
    interests = dict(decayed.interests)
    for post in posts:
        for concept in annotate(post, ontology).concepts:
            _bump(interests, concept, POST_INCREMENT, now)
    return replace(decayed, interests=interests, updated_at=now)


def record_feedback(
    profile: UserProfile,
    event: FeedbackEvent,
    corpus: Mapping[str, Artifact],
    half_life_days: float = DEFAULT_HALF_LIFE_DAYS,
) -> UserProfile:
    """Explicit feedback: decay at event time, then adjust each artifact concept."""
    artifact = corpus.get(event.artifact_id)
    if artifact is None:
        raise UnknownArtifact(f"unknown artifact {event.artifact_id!r}")
    if event.signal not in ("relevant", "not_relevant"):
        raise InvalidField(f"unknown feedback signal {event.signal!r}")
    decayed = apply_decay(profile, event.at, half_life_days)
    delta = RELEVANT_INCREMENT if event.signal == "relevant" else -NOT_RELEVANT_DECREMENT
    interests = dict(decayed.interests)
    for concept in sorted(artifact.concepts):
        _bump(interests, concept, delta, event.at)
    return replace(
        decayed,
        interests=interests,
        seen_artifacts=decayed.seen_artifacts | {event.artifact_id},
        updated_at=max(decayed.updated_at, event.at),
    )


def top_interests(profile: UserProfile, k: int) -> list[tuple[str, float]]:
    """Top-k interests with weights normalized to sum to 1 over the result."""
    ranked = sorted(profile.interests.items(), key=lambda kv: (-kv[1].weight, kv[0]))
    top = [(concept, iw.weight) for concept, iw in ranked[:k]]
    total = sum(weight for _, weight in top)
    if total <= 0.0:
        return []
    return [(concept, weight / total) for concept, weight in top]


class ProfileStore:
    """Directory of one JSON document per user: profiles/<user_id>.json."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreUnavailable(f"cannot use profile store {root}: {exc}") from exc

    def _path(self, user_id: str) -> Path:
        if not _USER_ID_RE.match(user_id):
            raise UnknownUser(f"invalid user id {user_id!r}")
        return self.root / f"{user_id}.json"

    def exists(self, user_id: str) -> bool:
        return self._path(user_id).exists()

    def save(self, profile: UserProfile) -> None:
        path = self._path(profile.user_id)
        tmp = path.with_suffix(".json.tmp")
        try:
            tmp.write_text(
                json.dumps(profile.to_dict(), ensure_ascii=False, indent=2),
                encoding="utf-8",
            )
            os.replace(tmp, path)
        except OSError as exc:
            raise StoreUnavailable(f"cannot write {path}: {exc}") from exc

    def create(self, profile: UserProfile) -> None:
        if self.exists(profile.user_id):
            raise DuplicateUser(f"profile {profile.user_id!r} already exists")
        self.save(profile)

    def load(self, user_id: str) -> UserProfile:
        path = self._path(user_id)
        if not path.exists():
            raise UnknownUser(f"no profile for user {user_id!r}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreUnavailable(f"cannot read {path}: {exc}") from exc
        return UserProfile.from_dict(doc)

    def list_users(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
