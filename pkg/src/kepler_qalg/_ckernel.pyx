# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled sparse term kernels (int64 keys and coefficients).

Same contracts as :mod:`kepler_qalg._pykernel`, except that a kernel returns
``None`` (``mul_terms``) or ``False`` (``addmul_into``) when a key or
coefficient does not fit in 64 bits; the caller then falls back to Python.
``addmul_into`` never touches ``out`` before it knows the result fits.
"""

from libc.stdint cimport int64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref, preincrement as inc

cdef extern from *:
    """
    static inline int kq_add(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int kq_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    """
    int kq_add(long long a, long long b, long long *r) nogil
    int kq_mul(long long a, long long b, long long *r) nogil


cdef int _load(dict d, vector[long long]& keys, vector[long long]& vals):
    """Copy a term map into two vectors; -1 if anything overflows int64."""
    keys.reserve(len(d))
    vals.reserve(len(d))
    try:
        for k, v in d.items():
            keys.push_back(k)
            vals.push_back(v)
    except OverflowError:
        return -1
    return 0


cdef int _product(dict a, dict b, long long scale,
                  unordered_map[long long, long long]& acc):
    cdef vector[long long] ka, va, kb, vb
    cdef size_t i, j, na, nb
    cdef long long k, c, ca
    cdef long long *slot
    if _load(a, ka, va) or _load(b, kb, vb):
        return -1
    na = ka.size()
    nb = kb.size()
    acc.reserve(na * nb if na * nb < 1 << 20 else 1 << 20)
    with nogil:
        for i in range(na):
            if kq_mul(va[i], scale, &ca):
                return -1
            for j in range(nb):
                if kq_add(ka[i], kb[j], &k) or kq_mul(ca, vb[j], &c):
                    return -1
                slot = &acc[k]
                if kq_add(slot[0], c, slot):
                    return -1
    return 0


def mul_terms(dict a, dict b):
    """Product of two term maps, or ``None`` on int64 overflow."""
    cdef unordered_map[long long, long long] acc
    cdef unordered_map[long long, long long].iterator it
    if len(a) > len(b):
        a, b = b, a
    if _product(a, b, 1, acc):
        return None
    out = {}
    it = acc.begin()
    while it != acc.end():
        if deref(it).second != 0:
            out[deref(it).first] = deref(it).second
        inc(it)
    return out


def addmul_into(dict out, dict a, dict b, scale):
    """``out += scale * a * b``; returns ``False`` (``out`` untouched) on overflow."""
    cdef unordered_map[long long, long long] acc
    cdef unordered_map[long long, long long].iterator it
    cdef long long s
    try:
        s = scale
    except OverflowError:
        return False
    if len(a) > len(b):
        a, b = b, a
    if _product(a, b, s, acc):
        return False
    get = out.get
    it = acc.begin()
    while it != acc.end():
        if deref(it).second != 0:
            key = deref(it).first
            out[key] = get(key, 0) + deref(it).second
        inc(it)
    return True
