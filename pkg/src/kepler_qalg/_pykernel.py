"""Pure-Python sparse term kernels.

A term map is a ``dict`` from a packed exponent key (a Python ``int``) to a
nonzero integer coefficient.  Packing is linear, so the key of a product of
monomials is the sum of the keys.
"""


def mul_terms(a, b):
    """Product of two term maps."""
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    bitems = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bitems:
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def addmul_into(out, a, b, scale):
    """``out += scale * a * b`` in place.  Zero entries may be left behind."""
    if len(a) > len(b):
        a, b = b, a
    get = out.get
    bitems = list(b.items())
    for ka, ca in a.items():
        cs = ca * scale
        for kb, cb in bitems:
            k = ka + kb
            out[k] = get(k, 0) + cs * cb


def rho_divide(terms, offset, shift, mask, sq_last, sq_others):
    """Exact division of a term map by ``rho = x_n**2 + sum_{i<n} x_i**2``.

    The exponent of ``x_n`` in a key is ``((key + offset) >> shift) & mask``
    (biased).  ``sq_last`` is the key of ``x_n**2`` and ``sq_others`` the keys
    of the other squares.  Returns the quotient or ``None`` if a remainder is
    left.  Negative exponents are fine: ``rho`` is monic in ``x_n`` and prime to
    every monomial.
    """
    if not terms:
        return {}
    buckets = {}
    for key, c in terms.items():
        e = ((key + offset) >> shift) & mask
        b = buckets.get(e)
        if b is None:
            buckets[e] = {key: c}
        else:
            b[key] = c
    lo = min(buckets)
    hi = max(buckets)
    if hi < lo + 2:
        return None
    quot = {}
    qget = quot.get
    for e in range(hi, lo + 1, -1):
        bucket = buckets.get(e)
        if not bucket:
            continue
        below = buckets.get(e - 2)
        if below is None:
            below = buckets[e - 2] = {}
        bget = below.get
        for key, c in bucket.items():
            if not c:
                continue
            base = key - sq_last
            quot[base] = qget(base, 0) + c
            for o in sq_others:
                k2 = base + o
                below[k2] = bget(k2, 0) - c
    for e in (lo, lo + 1):
        bucket = buckets.get(e)
        if bucket and any(bucket.values()):
            return None
    return {k: c for k, c in quot.items() if c}
