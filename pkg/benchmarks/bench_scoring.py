#!/usr/bin/env python3
"""Benchmark the compiled scoring kernel against the pure-Python fallback.

Builds a synthetic corpus, runs the same randomized query workload through
search() with each kernel and reports per-query latency plus the speedup.
The two paths must return identical results; this script asserts that too.

Usage: python benchmarks/bench_scoring.py [--docs 10000] [--queries 50]
"""

import argparse
import random
import statistics
import time
from itertools import accumulate

from devrec import qexp, scoring
from devrec.index import build_index, search
from devrec.ingest import Artifact, parse_timestamp


def synthetic_corpus(n_docs: int, vocab_size: int = 5000, doc_len: int = 100):
    rng = random.Random(1234)
    vocab = [f"w{i:05d}" for i in range(vocab_size)]
    cum_weights = list(accumulate(1.0 / (i + 1) for i in range(vocab_size)))
    created = parse_timestamp("2025-01-01T00:00:00+00:00")
    docs = []
    for i in range(n_docs):
        body = " ".join(rng.choices(vocab, cum_weights=cum_weights, k=doc_len))
        docs.append(
            Artifact(
                id=f"d:{i:06d}",
                kind="post",
                title="",
                body=body,
                url=None,
                source="bench",
                created_at=created,
            )
        )
    return docs, vocab


def run_workload(index, queries, use_compiled):
    timings = []
    results = []
    for eq in queries:
        started = time.perf_counter()
        results.append(search(index, eq, k=10, use_compiled=use_compiled))
        timings.append(time.perf_counter() - started)
    return timings, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=10_000)
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--terms", type=int, default=5, help="terms per query")
    args = parser.parse_args()

    print(f"building index over {args.docs} synthetic docs ...")
    docs, vocab = synthetic_corpus(args.docs)
    started = time.perf_counter()
    index = build_index(docs)
    print(f"  built in {time.perf_counter() - started:.2f} s (N={index.N})")

    rng = random.Random(99)
    queries = [
        qexp.no_expansion(" ".join(rng.sample(vocab[:800], args.terms)))
        for _ in range(args.queries)
    ]

    if not scoring.compiled_available():
        print("compiled kernel NOT available; benchmarking pure path only")
        timings, _ = run_workload(index, queries, use_compiled=False)
        print(f"pure-python: median {statistics.median(timings) * 1000:.2f} ms/query")
        return

    # warm up the dense arrays so the compiled path is measured, not the setup
    search(index, queries[0], k=10, use_compiled=True)

    pure_times, pure_results = run_workload(index, queries, use_compiled=False)
    fast_times, fast_results = run_workload(index, queries, use_compiled=True)

    assert pure_results == fast_results, "kernel outputs diverged"

    pure_ms = statistics.median(pure_times) * 1000
    fast_ms = statistics.median(fast_times) * 1000
    print(f"queries: {args.queries} x {args.terms} terms, k=10")
    print(f"  pure-python kernel: median {pure_ms:8.3f} ms/query")
    print(f"  compiled kernel:    median {fast_ms:8.3f} ms/query")
    print(f"  speedup:            {pure_ms / fast_ms:8.2f}x")
    print("  identical results:  yes")


if __name__ == "__main__":
    main()
