"""Score-accumulation kernels for the postings walk, the retrieval hot loop.

Two interchangeable implementations exist: a compiled Cython kernel over
dense arrays (devrec._scoring_cy) and the pure-Python sparse walk below.
Both consume contributions in the same order (terms sorted, postings sorted
by artifact id), so their floating-point results are bit-identical. Selection
happens at import: the compiled kernel is preferred when it built, and
DEVREC_PURE_PYTHON=1 forces the fallback. benchmarks/bench_scoring.py
compares the two.
"""

import os

try:
    from . import _scoring_cy as _compiled
except ImportError:  # extension not built on this platform
    _compiled = None


def compiled_available() -> bool:
    return _compiled is not None


def use_compiled() -> bool:
    if os.environ.get("DEVREC_PURE_PYTHON", "") in ("1", "true", "yes"):
        return False
    return _compiled is not None


def accumulate_sparse(entries) -> dict:
    """Pure-Python kernel.

    entries: iterable of (coeff, postings) where postings is a list of
    (doc_id, tf) sorted by doc_id; returns {doc_id: sum of coeff * tf}.
    """
    scores: dict = {}
    get = scores.get
    for coeff, postings in entries:
        for doc_id, tf in postings:
            scores[doc_id] = get(doc_id, 0.0) + coeff * tf
    return scores


def accumulate_dense(doc_arrays, tf_arrays, coeffs, n_docs, force_compiled=None):
    """Dense-array kernel; dispatches to the compiled extension when available.

    doc_arrays: list of int32 arrays of dense doc indices, one per term;
    tf_arrays: matching float64 arrays of term frequencies; coeffs: one
    float per term. Returns a float64 array of length n_docs.
    """
    pick_compiled = use_compiled() if force_compiled is None else force_compiled
    if pick_compiled:
        if _compiled is None:
            raise RuntimeError("compiled scoring kernel is not available")
        return _compiled.accumulate(doc_arrays, tf_arrays, list(coeffs), n_docs)
    import numpy as np

    out = np.zeros(n_docs, dtype=np.float64)
    for docs, tfs, coeff in zip(doc_arrays, tf_arrays, coeffs):
        np.add.at(out, docs, coeff * tfs)
    return out
