# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled versions of the hot kernels (see ``_pure`` for the reference)."""

from libc.stdint cimport uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

import numpy as np

BACKEND = "cython"


cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long)
    int ctz64 "__builtin_ctzll"(unsigned long long)


cdef vector[uint64_t] _as_masks(seq):
    cdef vector[uint64_t] out
    out.reserve(len(seq))
    for m in seq:
        out.push_back(<uint64_t>m)
    return out


cdef vector[double] _as_vals(seq):
    cdef vector[double] out
    out.reserve(len(seq))
    for v in seq:
        out.push_back(<double>v)
    return out


def combine_masses(a_masks, a_vals, b_masks, b_vals):
    cdef vector[uint64_t] am = _as_masks(a_masks)
    cdef vector[double] av = _as_vals(a_vals)
    cdef vector[uint64_t] bm = _as_masks(b_masks)
    cdef vector[double] bv = _as_vals(b_vals)
    cdef unordered_map[uint64_t, double] acc
    # first-insertion order, so the Python dict below matches the pure backend
    cdef vector[uint64_t] order
    cdef Py_ssize_t i, j, na = am.size(), nb = bm.size()
    cdef uint64_t key
    cdef double prod, conflict = 0.0
    acc.reserve(na * nb)
    for i in range(na):
        for j in range(nb):
            key = am[i] & bm[j]
            prod = av[i] * bv[j]
            if key:
                if acc.count(key) == 0:
                    order.push_back(key)
                    acc[key] = prod
                else:
                    acc[key] = acc[key] + prod
            else:
                conflict += prod
    products = {}
    for i in range(<Py_ssize_t>order.size()):
        products[order[i]] = acc[order[i]]
    return products, conflict


def pignistic_masses(masks, vals, int size):
    cdef vector[uint64_t] ms = _as_masks(masks)
    cdef vector[double] vs = _as_vals(vals)
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] probs = out
    cdef Py_ssize_t i
    cdef uint64_t mask
    cdef double share
    for i in range(<Py_ssize_t>ms.size()):
        mask = ms[i]
        share = vs[i] / popcount64(mask)
        while mask:
            probs[ctz64(mask)] += share
            mask &= mask - 1
    return out


def singleton_support(masks, vals, int size):
    cdef vector[uint64_t] ms = _as_masks(masks)
    cdef vector[double] vs = _as_vals(vals)
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] support = out
    cdef Py_ssize_t i
    cdef uint64_t mask
    cdef double weighted = 0.0
    for i in range(<Py_ssize_t>ms.size()):
        mask = ms[i]
        weighted += vs[i] * popcount64(mask)
        while mask:
            support[ctz64(mask)] += vs[i]
            mask &= mask - 1
    return out, weighted
