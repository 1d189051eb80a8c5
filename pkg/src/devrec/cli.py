"""devrec command-line interface.

Subcommands cover the whole pipeline: ingest sources, build the annotated
index, search, recommend, classify, evaluate, manage profiles and serve the
HTTP API. `DEVREC_CONFIG` may point at a JSON file whose keys mirror the
serve flags.
"""

import json
import os
import sys
from pathlib import Path

import click

from . import evaluate as evalmod
from . import qexp
from .errors import DevRecError
from .index import (
    DEFAULT_BETA,
    DEFAULT_TAU,
    build_index,
    load_index,
    save_index,
    search as run_search,
)
from .ingest import (
    cleanse,
    normalize,
    parse_source,
    parse_timestamp,
    read_corpus,
    utcnow,
    write_corpus,
)
from .ontology import annotate, load_ontology
from .profile import (
    DEFAULT_HALF_LIFE_DAYS,
    ProfileStore,
    apply_decay,
    create_profile,
    ingest_posts as ingest_posts_op,
    top_interests,
)
from .recommend import classify_artifact, recommend as run_recommend


@click.group()
def main():
    """Personalized search and recommendations over development artifacts."""


def _fail(exc: DevRecError):
    click.echo(f"error [{exc.code}]: {exc}", err=True)
    sys.exit(1)


@main.command("ingest")
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", required=True, type=click.Choice(["jsonl", "csv", "xml"]))
@click.option("--origin", required=True)
@click.option("--kind", "kind_hint", default=None)
@click.option("--out", "output_path", required=True, type=click.Path())
def ingest_cmd(input_path, fmt, origin, kind_hint, output_path):
    """Parse, cleanse and normalize one source file into a JSONL corpus."""
    payload = Path(input_path).read_bytes()
    try:
        parsed = parse_source(fmt, payload, origin=origin)
        records = cleanse(parsed.records)
        now = utcnow()
        artifacts = [normalize(r, kind_hint=kind_hint, now=now) for r in records]
        count = write_corpus(artifacts, output_path)
    except DevRecError as exc:
        _fail(exc)
    click.echo(
        f"wrote {count} artifacts to {output_path} "
        f"(parsed {len(parsed.records)}, skipped {parsed.skipped}, "
        f"deduped {len(parsed.records) - len(records)})"
    )


@main.command("index")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--ontology", "ontology_path", required=True, type=click.Path(exists=True))
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--title-weight", default=2, show_default=True)
def index_cmd(corpus_path, ontology_path, output_path, title_weight):
    """Annotate a corpus against the ontology and build the inverted index."""
    try:
        ontology = load_ontology(ontology_path)
        corpus = read_corpus(corpus_path)
        annotated = [annotate(a, ontology) for a in corpus]
        index = build_index(annotated, ontology=ontology, title_weight=title_weight)
        save_index(index, output_path)
    except DevRecError as exc:
        _fail(exc)
    click.echo(
        f"indexed {index.N} artifacts ({index.skipped_empty} empty skipped) "
        f"into {output_path}"
    )


def _load_profile_if_any(profiles_dir, user):
    if not user:
        return None
    return ProfileStore(profiles_dir).load(user)


@main.command("search")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
@click.option("--user", default=None)
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
@click.option("--query", required=True)
@click.option("-k", default=10, show_default=True)
@click.option("--beta", default=DEFAULT_BETA, show_default=True)
@click.option("--strict", is_flag=True, default=False)
@click.option("--tau", default=DEFAULT_TAU, show_default=True)
@click.option("--no-expand", is_flag=True, default=False)
def search_cmd(index_path, lexicon_path, user, profiles_dir, query, k, beta, strict, tau, no_expand):
    """Rank artifacts for a query; one tab-separated result per line."""
    try:
        index = load_index(index_path)
        lexicon = qexp.load_lexicon(lexicon_path) if lexicon_path else qexp.EMPTY_LEXICON
        profile = _load_profile_if_any(profiles_dir, user)
        if no_expand:
            eq = qexp.no_expansion(query)
        else:
            eq = qexp.expand(query, lexicon, index.ontology)
        results = run_search(
            index, eq, profile=profile, k=k, beta=beta, strict=strict, tau=tau
        )
    except DevRecError as exc:
        _fail(exc)
    for rank, r in enumerate(results, 1):
        click.echo(
            f"{rank}\t{r.artifact_id}\t{r.final_score:.6f}\t{r.cosine:.6f}"
            f"\t{r.interest_overlap:.6f}\t{','.join(sorted(r.matched_terms))}"
        )


@main.command("recommend")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--ontology", "ontology_path", default=None, type=click.Path(exists=True))
@click.option("--user", required=True)
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
@click.option("-k", default=10, show_default=True)
def recommend_cmd(index_path, ontology_path, user, profiles_dir, k):
    """Query-less browsing recommendations for a user."""
    try:
        index = load_index(index_path)
        ontology = load_ontology(ontology_path) if ontology_path else index.ontology
        profile = ProfileStore(profiles_dir).load(user)
        results = run_recommend(profile, index, ontology, k=k)
    except DevRecError as exc:
        _fail(exc)
    for rank, r in enumerate(results, 1):
        artifact = index.artifacts[r.artifact_id]
        click.echo(
            f"{rank}\t{r.artifact_id}\t{r.final_score:.6f}"
            f"\t{artifact.kind}\t{artifact.title[:60]}"
        )


@main.command("classify")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--artifact", "artifact_id", required=True)
def classify_cmd(index_path, labels_path, artifact_id):
    """Nearest-centroid label for one indexed artifact."""
    try:
        index = load_index(index_path)
        labeled = []
        for line in Path(labels_path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            doc_id, _, label = line.partition("\t")
            labeled.append((doc_id, label))
        artifact = index.artifacts.get(artifact_id)
        if artifact is None:
            raise DevRecError(f"artifact {artifact_id!r} not in index")
        label, confidence = classify_artifact(artifact, index, labeled)
    except DevRecError as exc:
        _fail(exc)
    click.echo(f"{artifact_id}\t{label}\t{confidence:.6f}")


@main.group("profile")
def profile_group():
    """Create, inspect and update user profiles."""


@profile_group.command("init")
@click.option("--file", "form_path", required=True, type=click.Path(exists=True))
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
def profile_init(form_path, profiles_dir):
    """Create a profile from an explicit-form JSON document."""
    try:
        form = json.loads(Path(form_path).read_text(encoding="utf-8"))
        profile = create_profile(form, utcnow())
        ProfileStore(profiles_dir).create(profile)
    except DevRecError as exc:
        _fail(exc)
    click.echo(f"created profile {profile.user_id}")


@profile_group.command("show")
@click.option("--user", required=True)
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
def profile_show(user, profiles_dir):
    try:
        profile = ProfileStore(profiles_dir).load(user)
    except DevRecError as exc:
        _fail(exc)
    click.echo(json.dumps(profile.to_dict(), indent=2, ensure_ascii=False))


@profile_group.command("decay")
@click.option("--user", required=True)
@click.option("--now", "now_text", required=True)
@click.option("--half-life", default=DEFAULT_HALF_LIFE_DAYS, show_default=True)
@click.option("--dry-run", is_flag=True, default=False)
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
def profile_decay(user, now_text, half_life, dry_run, profiles_dir):
    """Apply temporal decay to a user's interests as of a given instant."""
    try:
        store = ProfileStore(profiles_dir)
        profile = store.load(user)
        decayed = apply_decay(profile, parse_timestamp(now_text), half_life)
        if not dry_run:
            store.save(decayed)
    except DevRecError as exc:
        _fail(exc)
    for concept, iw in sorted(decayed.interests.items()):
        click.echo(f"{concept}\t{iw.weight:.6f}")


@profile_group.command("ingest-posts")
@click.option("--user", required=True)
@click.option("--posts", "posts_path", required=True, type=click.Path(exists=True))
@click.option("--ontology", "ontology_path", required=True, type=click.Path(exists=True))
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
@click.option("--half-life", default=DEFAULT_HALF_LIFE_DAYS, show_default=True)
def profile_ingest_posts(user, posts_path, ontology_path, profiles_dir, half_life):
    """Accrue implicit interests from a JSONL file of the user's posts."""
    try:
        store = ProfileStore(profiles_dir)
        profile = store.load(user)
        ontology = load_ontology(ontology_path)
        posts = read_corpus(posts_path)
        updated = ingest_posts_op(profile, posts, ontology, utcnow(), half_life)
        store.save(updated)
    except DevRecError as exc:
        _fail(exc)
    click.echo(f"ingested {len(posts)} posts for {user}")
    for concept, weight in top_interests(updated, 10):
        click.echo(f"{concept}\t{weight:.4f}")


@main.command("eval")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--queries", "queries_path", required=True, type=click.Path(exists=True))
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True))
@click.option("-k", default=10, show_default=True)
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
@click.option("--user", default=None)
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
@click.option("--no-expand", is_flag=True, default=False)
@click.option("--json", "as_json", is_flag=True, default=False)
def eval_cmd(index_path, queries_path, qrels_path, k, lexicon_path, user, profiles_dir, no_expand, as_json):
    """Run the quality harness: P@k, R@k, MRR and nDCG@k over labeled queries."""
    try:
        index = load_index(index_path)
        queries = evalmod.load_queries(queries_path)
        judgments = evalmod.load_qrels(qrels_path)
        lexicon = qexp.load_lexicon(lexicon_path) if lexicon_path else qexp.EMPTY_LEXICON
        profile = _load_profile_if_any(profiles_dir, user)
        run = {}
        for query_id, text in queries.items():
            eq = qexp.no_expansion(text) if no_expand else qexp.expand(text, lexicon, index.ontology)
            results = run_search(index, eq, profile=profile, k=k)
            run[query_id] = [r.artifact_id for r in results]
        report = evalmod.evaluate_run(run, judgments, k)
        if user:
            from dataclasses import replace
            from .profile import Quality

            store = ProfileStore(profiles_dir)
            updated = replace(profile, quality=Quality(last_eval=dict(report.macro)))
            store.save(updated)
    except DevRecError as exc:
        _fail(exc)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "k": report.k,
                    "macro": report.macro,
                    "per_query": report.per_query,
                    "skipped_queries": report.skipped_queries,
                },
                indent=2,
            )
        )
        return
    names = report.metric_names()
    click.echo("query\t" + "\t".join(names))
    for query_id, values in report.per_query.items():
        click.echo(query_id + "\t" + "\t".join(f"{values[n]:.4f}" for n in names))
    click.echo("macro\t" + "\t".join(f"{report.macro[n]:.4f}" for n in names))
    if report.skipped_queries:
        click.echo(f"skipped (no relevant docs): {','.join(report.skipped_queries)}")


@main.command("serve")
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--index", "index_path", type=click.Path(exists=True))
@click.option("--ontology", "ontology_path", default=None, type=click.Path(exists=True))
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
@click.option("--profiles", "profiles_dir", default="profiles", show_default=True)
@click.option("--allow-ingest", is_flag=True, default=False)
def serve_cmd(port, host, index_path, ontology_path, lexicon_path, profiles_dir, allow_ingest):
    """Run the HTTP service consumed by the web UI and by scripts."""
    from .service import ServiceConfig, run_service

    overrides = {}
    config_path = os.environ.get("DEVREC_CONFIG")
    if config_path:
        overrides = json.loads(Path(config_path).read_text(encoding="utf-8"))
    config = ServiceConfig(
        index_path=overrides.get("index", index_path),
        profiles_path=overrides.get("profiles", profiles_dir),
        ontology_path=overrides.get("ontology", ontology_path),
        lexicon_path=overrides.get("lexicon", lexicon_path),
        allow_ingest=overrides.get("allow_ingest", allow_ingest),
    )
    if not config.index_path:
        click.echo("error: --index is required (or set it in DEVREC_CONFIG)", err=True)
        sys.exit(1)
    try:
        run_service(config, host=overrides.get("host", host), port=int(overrides.get("port", port)))
    except DevRecError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
