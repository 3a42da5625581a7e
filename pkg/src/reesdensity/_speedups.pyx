# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exponent-vector kernels.

Mirror of ``reesdensity._kernels_py``; the two must agree byte for byte.
"""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF
from libc.stdlib cimport free, malloc


def backend_name():
    return "compiled"


cdef inline long _deg(tuple t):
    cdef long s = 0
    for v in t:
        s += <long> v
    return s


def _canonical(gens):
    return sorted(set(map(tuple, gens)), key=lambda t: (sum(t), t))


cdef long *_flatten(list rows, Py_ssize_t k, Py_ssize_t d) except NULL:
    cdef long *buf = <long *> malloc(k * d * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef tuple row
    for i in range(k):
        row = <tuple> rows[i]
        for j in range(d):
            buf[i * d + j] = <long> row[j]
    return buf


def minimalize_exponents(gens):
    """Keep only the divisibility-minimal exponent vectors."""
    cdef list uniq = _canonical(gens)
    cdef Py_ssize_t k = len(uniq)
    if k <= 1:
        return uniq
    cdef Py_ssize_t d = len(<tuple> uniq[0])
    cdef long *buf = _flatten(uniq, k, d)
    cdef long *degs = <long *> malloc(k * sizeof(long))
    cdef char *keep = <char *> malloc(k)
    if degs == NULL or keep == NULL:
        free(buf)
        free(degs)
        free(keep)
        raise MemoryError()
    cdef Py_ssize_t i, j, t
    cdef bint div
    try:
        for i in range(k):
            keep[i] = 1
            degs[i] = 0
            for t in range(d):
                degs[i] += buf[i * d + t]
        for i in range(1, k):
            for j in range(i):
                # equal-degree distinct vectors never divide each other
                if keep[j] and degs[j] < degs[i]:
                    div = True
                    for t in range(d):
                        if buf[j * d + t] > buf[i * d + t]:
                            div = False
                            break
                    if div:
                        keep[i] = 0
                        break
        return [uniq[i] for i in range(k) if keep[i]]
    finally:
        free(buf)
        free(degs)
        free(keep)


cdef tuple _row_tuple(long *vals, Py_ssize_t d):
    cdef tuple out = PyTuple_New(d)
    cdef Py_ssize_t t
    cdef object v
    for t in range(d):
        v = vals[t]
        Py_INCREF(v)
        PyTuple_SET_ITEM(out, t, v)
    return out


def product_exponents(a_gens, b_gens):
    """Minimal generators of the product: pairwise sums, then minimalize."""
    cdef list arows = list(map(tuple, a_gens))
    cdef list brows = list(map(tuple, b_gens))
    cdef Py_ssize_t ka = len(arows), kb = len(brows)
    if ka == 0 or kb == 0:
        return []
    cdef Py_ssize_t d = len(<tuple> arows[0])
    cdef long *abuf = _flatten(arows, ka, d)
    cdef long *bbuf = _flatten(brows, kb, d)
    cdef long *row = <long *> malloc(d * sizeof(long))
    if row == NULL:
        free(abuf)
        free(bbuf)
        raise MemoryError()
    cdef set sums = set()
    cdef Py_ssize_t i, j, t
    try:
        for i in range(ka):
            for j in range(kb):
                for t in range(d):
                    row[t] = abuf[i * d + t] + bbuf[j * d + t]
                sums.add(_row_tuple(row, d))
        return minimalize_exponents(sums)
    finally:
        free(abuf)
        free(bbuf)
        free(row)


def intersect_exponents(a_gens, b_gens):
    """Minimal generators of the intersection: pairwise lcm (componentwise max)."""
    cdef list arows = list(map(tuple, a_gens))
    cdef list brows = list(map(tuple, b_gens))
    cdef Py_ssize_t ka = len(arows), kb = len(brows)
    if ka == 0 or kb == 0:
        return []
    cdef Py_ssize_t d = len(<tuple> arows[0])
    cdef long *abuf = _flatten(arows, ka, d)
    cdef long *bbuf = _flatten(brows, kb, d)
    cdef long *row = <long *> malloc(d * sizeof(long))
    if row == NULL:
        free(abuf)
        free(bbuf)
        raise MemoryError()
    cdef set joins = set()
    cdef Py_ssize_t i, j, t
    cdef long x, y
    try:
        for i in range(ka):
            for j in range(kb):
                for t in range(d):
                    x = abuf[i * d + t]
                    y = bbuf[j * d + t]
                    row[t] = x if x > y else y
                joins.add(_row_tuple(row, d))
        return minimalize_exponents(joins)
    finally:
        free(abuf)
        free(bbuf)
        free(row)


def divides_any(exp, gens):
    """True iff some generator divides ``exp`` componentwise."""
    cdef tuple target = tuple(exp)
    cdef list rows = list(map(tuple, gens))
    cdef Py_ssize_t k = len(rows)
    if k == 0:
        return False
    cdef Py_ssize_t d = len(target)
    cdef long *buf = _flatten(rows, k, d)
    cdef long *tv = <long *> malloc(d * sizeof(long))
    if tv == NULL:
        free(buf)
        raise MemoryError()
    cdef Py_ssize_t i, t
    cdef bint ok
    try:
        for t in range(d):
            tv[t] = <long> target[t]
        for i in range(k):
            ok = True
            for t in range(d):
                if buf[i * d + t] > tv[t]:
                    ok = False
                    break
            if ok:
                return True
        return False
    finally:
        free(buf)
        free(tv)
