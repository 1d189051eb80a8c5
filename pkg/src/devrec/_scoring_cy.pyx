# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled score-accumulation kernel.

Must mirror devrec.scoring.accumulate_sparse contribution order exactly so
the two kernels stay bit-identical: callers pass terms in sorted order and
postings sorted by doc index.
"""

import numpy as np


def accumulate(list doc_arrays, list tf_arrays, list coeffs, Py_ssize_t n_docs):
    """Sum coeff * tf into a dense score vector, one entry per document."""
    out = np.zeros(n_docs, dtype=np.float64)
    cdef double[::1] out_view = out
    cdef const int[::1] docs
    cdef const double[::1] tfs
    cdef double coeff
    cdef Py_ssize_t i, j, m
    for i in range(len(doc_arrays)):
        docs = doc_arrays[i]
        tfs = tf_arrays[i]
        coeff = coeffs[i]
        m = docs.shape[0]
        for j in range(m):
            out_view[docs[j]] += coeff * tfs[j]
    return out
