"""Pure-Python implementations of the hot polynomial-arithmetic kernels.

Same contract as _speedups.pyx. All functions operate on plain data:
exponent vectors are tuples of non-negative ints, polynomials are dicts
mapping exponent vectors to nonzero numeric coefficients (int or Fraction).
Zero coefficients are never stored.
"""

from math import gcd


def expvec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def expvec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def expvec_divides(a, b):
    """True when x^a divides x^b (componentwise a <= b)."""
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def expvec_lcm(a, b):
    return tuple(x if x >= y else y for x, y in zip(a, b))


def expvec_min(a, b):
    return tuple(x if x <= y else y for x, y in zip(a, b))


def dict_add(A, B):
    out = dict(A)
    for k, v in B.items():
        s = out.get(k)
        if s is None:
            out[k] = v
        else:
            s = s + v
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def dict_sub(A, B):
    out = dict(A)
    for k, v in B.items():
        s = out.get(k)
        if s is None:
            out[k] = -v
        else:
            s = s - v
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def dict_neg(A):
    return {k: -v for k, v in A.items()}


def dict_scale(A, c):
    if not c:
        return {}
    return {k: v * c for k, v in A.items()}


def dict_mul(A, B):
    if not A or not B:
        return {}
    if len(A) > len(B):
        A, B = B, A
    out = {}
    for ka, va in A.items():
        for kb, vb in B.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            s = out.get(k)
            if s is None:
                out[k] = va * vb
            else:
                s = s + va * vb
                if s:
                    out[k] = s
                else:
                    del out[k]
    return out


def dict_term_mul(A, c, m):
    """c * x^m * A with c nonzero."""
    return {tuple(x + y for x, y in zip(k, m)): v * c for k, v in A.items()}


def dict_axpy(P, c, m, B):
    """In-place P += c * x^m * B; returns P. c must be nonzero."""
    for k, v in B.items():
        key = tuple(x + y for x, y in zip(k, m))
        s = P.get(key)
        if s is None:
            P[key] = c * v
        else:
            s = s + c * v
            if s:
                P[key] = s
            else:
                del P[key]
    return P


def dict_int_content(A):
    """gcd of the (integer) coefficients; 0 for the empty dict."""
    g = 0
    for v in A.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def dict_div_int(A, g):
    return {k: v // g for k, v in A.items()}
