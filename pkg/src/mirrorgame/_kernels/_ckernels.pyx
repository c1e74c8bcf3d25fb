# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels over single-word (<= 64 bit) masks."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free


cdef extern from *:
    int __builtin_parityll(unsigned long long x) nogil
    int __builtin_clzll(unsigned long long x) nogil


cdef uint64_t* _copy(list masks, Py_ssize_t n) except NULL:
    cdef uint64_t* buf = <uint64_t*> malloc(max(n, 1) * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = <uint64_t> masks[i]
    return buf


def gf2_rank(list rows):
    cdef Py_ssize_t n = len(rows)
    cdef uint64_t* work = _copy(rows, n)
    cdef uint64_t basis[64]
    cdef int rank = 0
    cdef int lead
    cdef uint64_t row
    cdef Py_ssize_t i
    for i in range(64):
        basis[i] = 0
    try:
        for i in range(n):
            row = work[i]
            while row:
                lead = 63 - __builtin_clzll(row)
                if basis[lead] == 0:
                    basis[lead] = row
                    rank += 1
                    break
                row ^= basis[lead]
    finally:
        free(work)
    return rank


def even_pairs(list masks):
    cdef Py_ssize_t n = len(masks)
    cdef uint64_t* m = _copy(masks, n)
    cdef char* alive = <char*> malloc(max(n, 1))
    cdef Py_ssize_t i, j
    cdef uint64_t a
    out = []
    if alive == NULL:
        free(m)
        raise MemoryError()
    try:
        for i in range(n):
            alive[i] = 1
        for i in range(n):
            if not alive[i]:
                continue
            a = m[i]
            for j in range(i + 1, n):
                if alive[j] and not __builtin_parityll(a & m[j]):
                    alive[i] = 0
                    alive[j] = 0
                    out.append((i, j))
                    break
    finally:
        free(m)
        free(alive)
    return out


def is_oddtown(list masks):
    cdef Py_ssize_t n = len(masks)
    cdef uint64_t* m = _copy(masks, n)
    cdef Py_ssize_t i, j
    try:
        for i in range(n):
            if __builtin_parityll(m[i]):
                return False
            for j in range(i + 1, n):
                if not __builtin_parityll(m[i] & m[j]):
                    return False
        return True
    finally:
        free(m)
