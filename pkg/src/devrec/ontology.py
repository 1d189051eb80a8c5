"""Lightweight domain ontology: class forest, instance matching, rules, similarity.

The ontology is immutable after load; every operation here is read-only and
safe for concurrent use.
"""

import json
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import CycleDetected, DanglingReference, DuplicateId, ParseError, UnknownConcept
from .ingest import Artifact
from .text import tokenize

# similarity assigned to concepts living in disjoint trees of the forest
DIFFERENT_TREE_SIM = 0.05


@dataclass(frozen=True)
class OntClass:
    id: str
    label: str
    parent: str | None = None


@dataclass(frozen=True)
class OntInstance:
    id: str
    class_id: str
    surface_forms: tuple[str, ...]


@dataclass(frozen=True)
class AnnotationRule:
    """Conjunctive presence-rule: if each required class is matched at least
    min_count times, conclude one concept."""

    id: str
    require: tuple[tuple[str, int], ...]
    conclude: str


@dataclass(frozen=True)
class InstanceMatch:
    instance_id: str
    class_id: str
    span: tuple[int, int]  # inclusive token indices


class Ontology:
    """Validated class forest plus instances and rules.

    Precomputes class depths (root depth = 1), per-class tree roots and a
    first-token index over tokenized surface forms for fast matching.
    """

    def __init__(
        self,
        classes: list[OntClass],
        instances: list[OntInstance],
        rules: list[AnnotationRule],
    ):
        self.classes: dict[str, OntClass] = {}
        for cls in classes:
            if cls.id in self.classes:
                raise DuplicateId(f"duplicate class id {cls.id!r}")
            self.classes[cls.id] = cls

        self.instances: dict[str, OntInstance] = {}
        for inst in instances:
            if inst.id in self.instances:
                raise DuplicateId(f"duplicate instance id {inst.id!r}")
            if inst.class_id not in self.classes:
                raise DanglingReference(
                    f"instance {inst.id!r} refers to unknown class {inst.class_id!r}"
                )
            if not inst.surface_forms:
                raise ParseError(f"instance {inst.id!r} has no surface forms")
            self.instances[inst.id] = inst

        self.rules: list[AnnotationRule] = []
        rule_ids: set[str] = set()
        for rule in rules:
            if rule.id in rule_ids:
                raise DuplicateId(f"duplicate rule id {rule.id!r}")
            rule_ids.add(rule.id)
            if not rule.require:
                raise ParseError(f"rule {rule.id!r} requires nothing")
            seen_req: set[str] = set()
            for class_id, min_count in rule.require:
                if class_id in seen_req:
                    raise ParseError(
                        f"rule {rule.id!r} lists class {class_id!r} twice"
                    )
                seen_req.add(class_id)
                if class_id not in self.classes:
                    raise DanglingReference(
                        f"rule {rule.id!r} requires unknown class {class_id!r}"
                    )
                if min_count < 1:
                    raise ParseError(
                        f"rule {rule.id!r}: min count must be positive for {class_id!r}"
                    )
            if rule.conclude not in self.classes:
                raise DanglingReference(
                    f"rule {rule.id!r} concludes unknown concept {rule.conclude!r}"
                )
            self.rules.append(rule)

        self._depth: dict[str, int] = {}
        self._root: dict[str, str] = {}
        for class_id in self.classes:
            self._resolve_lineage(class_id)

        # first query token -> [(form tokens, instance)], longest form first,
        # then instance id for a deterministic tie-break
        self._forms: dict[str, list[tuple[tuple[str, ...], OntInstance]]] = {}
        for inst in self.instances.values():
            for form in inst.surface_forms:
                form_tokens = tuple(tokenize(form))
                if not form_tokens:
                    raise ParseError(
                        f"surface form {form!r} of instance {inst.id!r} "
                        "tokenizes to nothing"
                    )
                self._forms.setdefault(form_tokens[0], []).append((form_tokens, inst))
        for entries in self._forms.values():
            entries.sort(key=lambda e: (-len(e[0]), e[1].id, e[0]))

    def _resolve_lineage(self, class_id: str) -> None:
        chain: list[str] = []
        on_chain: set[str] = set()
        current: str | None = class_id
        while current is not None and current not in self._depth:
            if current in on_chain:
                raise CycleDetected(f"cycle through class {current!r}")
            if current not in self.classes:
                raise DanglingReference(
                    f"class {chain[-1]!r} has unknown parent {current!r}"
                )
            chain.append(current)
            on_chain.add(current)
            current = self.classes[current].parent
        if current is None:
            base_depth, root = 0, chain[-1] if chain else class_id
        else:
            base_depth, root = self._depth[current], self._root[current]
        for offset, cid in enumerate(reversed(chain), start=1):
            self._depth[cid] = base_depth + offset
            self._root[cid] = root

    def depth(self, class_id: str) -> int:
        """Depth in the class forest; roots have depth 1."""
        if class_id not in self._depth:
            raise UnknownConcept(f"unknown concept {class_id!r}")
        return self._depth[class_id]

    def root_of(self, class_id: str) -> str:
        if class_id not in self._root:
            raise UnknownConcept(f"unknown concept {class_id!r}")
        return self._root[class_id]

    def ancestors(self, class_id: str) -> list[str]:
        """Path from class to its root, inclusive."""
        path = []
        current: str | None = class_id
        while current is not None:
            path.append(current)
            current = self.classes[current].parent
        return path

    def forms_starting_with(self, token: str):
        return self._forms.get(token, ())

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.classes

    def to_dict(self) -> dict:
        doc: dict = {"classes": [], "instances": [], "rules": []}
        for cls in self.classes.values():
            entry = {"id": cls.id, "label": cls.label}
            if cls.parent is not None:
                entry["parent"] = cls.parent
            doc["classes"].append(entry)
        for inst in self.instances.values():
            doc["instances"].append(
                {
                    "id": inst.id,
                    "class": inst.class_id,
                    "surface_forms": list(inst.surface_forms),
                }
            )
        for rule in self.rules:
            doc["rules"].append(
                {
                    "id": rule.id,
                    "require": [
                        {"class": class_id, "min": min_count}
                        for class_id, min_count in rule.require
                    ],
                    "conclude": rule.conclude,
                }
            )
        return doc


def load_ontology(path: str | Path) -> Ontology:
    """Load and validate an ontology from its JSON file format."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read ontology {path}: {exc}") from exc
    return ontology_from_dict(doc, source=str(path))


def ontology_from_dict(doc: dict, source: str = "<dict>") -> Ontology:
    if not isinstance(doc, dict):
        raise ParseError(f"ontology {source}: top level must be an object")
    try:
        classes = [
            OntClass(id=c["id"], label=c.get("label", c["id"]), parent=c.get("parent"))
            for c in doc.get("classes", [])
        ]
        instances = [
            OntInstance(
                id=i["id"],
                class_id=i["class"],
                surface_forms=tuple(i["surface_forms"]),
            )
            for i in doc.get("instances", [])
        ]
        rules = [
            AnnotationRule(
                id=r["id"],
                require=tuple(
                    (req["class"], int(req.get("min", 1))) for req in r["require"]
                ),
                conclude=r["conclude"],
            )
            for r in doc.get("rules", [])
        ]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"ontology {source}: malformed entry: {exc}") from exc
    return Ontology(classes, instances, rules)


def match_instances(tokens: list[str], ontology: Ontology) -> list[InstanceMatch]:
    """Longest-match-first, left-to-right, non-overlapping surface-form matching."""
    matches: list[InstanceMatch] = []
    i, n = 0, len(tokens)
    while i < n:
        hit = None
        for form_tokens, inst in ontology.forms_starting_with(tokens[i]):
            length = len(form_tokens)
            if i + length <= n and tuple(tokens[i : i + length]) == form_tokens:
                hit = (length, inst)
                break  # entries are sorted longest-first
        if hit is None:
            i += 1
        else:
            length, inst = hit
            matches.append(
                InstanceMatch(
                    instance_id=inst.id,
                    class_id=inst.class_id,
                    span=(i, i + length - 1),
                )
            )
            i += length
    return matches


def apply_rules(matches: list[InstanceMatch], ontology: Ontology) -> set[str]:
    """Classes of all matches plus conclusions of every satisfied rule."""
    counts = Counter(m.class_id for m in matches)
    concepts = set(counts)
    for rule in ontology.rules:
        if all(counts.get(class_id, 0) >= needed for class_id, needed in rule.require):
            concepts.add(rule.conclude)
    return concepts


def annotate(artifact: Artifact, ontology: Ontology) -> Artifact:
    """Attach ontology concepts derived from the artifact's text.

    Deterministic and idempotent: concepts are recomputed from title+body,
    never from previous annotations.
    """
    tokens = tokenize(artifact.title + "\n" + artifact.body)
    concepts = apply_rules(match_instances(tokens, ontology), ontology)
    return replace(artifact, concepts=frozenset(concepts))


def concept_similarity(a: str, b: str, ontology: Ontology) -> float:
    """Wu-Palmer similarity over the class forest: 2*depth(lca)/(depth(a)+depth(b)).

    Concepts in disjoint trees get the small fixed floor DIFFERENT_TREE_SIM.
    """
    if a not in ontology:
        raise UnknownConcept(f"unknown concept {a!r}")
    if b not in ontology:
        raise UnknownConcept(f"unknown concept {b!r}")
    if ontology.root_of(a) != ontology.root_of(b):
        return DIFFERENT_TREE_SIM
    ancestors_a = ontology.ancestors(a)
    rank_a = {cid: i for i, cid in enumerate(ancestors_a)}
    lca = next(cid for cid in ontology.ancestors(b) if cid in rank_a)
    return 2.0 * ontology.depth(lca) / (ontology.depth(a) + ontology.depth(b))
