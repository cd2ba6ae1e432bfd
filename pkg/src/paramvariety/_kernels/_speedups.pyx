# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled implementations of the hot polynomial-arithmetic kernels.

Same contract as _pure.py: exponent vectors are tuples of ints, polynomial
term maps are dicts {exponent tuple: nonzero coefficient}. Coefficients are
arbitrary-precision Python ints (or Fractions), so coefficient arithmetic
stays at the object level; the wins come from tight tuple/dict loops.
"""

from math import gcd

cimport cython
from cpython.tuple cimport PyTuple_GET_SIZE, PyTuple_GET_ITEM, PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF


cdef inline tuple _tuple_add(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple out = PyTuple_New(n)
    cdef object s
    for i in range(n):
        s = (<object>PyTuple_GET_ITEM(a, i)) + (<object>PyTuple_GET_ITEM(b, i))
        Py_INCREF(s)
        PyTuple_SET_ITEM(out, i, s)
    return out


def expvec_add(tuple a, tuple b):
    return _tuple_add(a, b)


def expvec_sub(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple out = PyTuple_New(n)
    cdef object s
    for i in range(n):
        s = (<object>PyTuple_GET_ITEM(a, i)) - (<object>PyTuple_GET_ITEM(b, i))
        Py_INCREF(s)
        PyTuple_SET_ITEM(out, i, s)
    return out


def expvec_divides(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    for i in range(n):
        if (<object>PyTuple_GET_ITEM(a, i)) > (<object>PyTuple_GET_ITEM(b, i)):
            return False
    return True


def expvec_lcm(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple out = PyTuple_New(n)
    cdef object x, y, s
    for i in range(n):
        x = <object>PyTuple_GET_ITEM(a, i)
        y = <object>PyTuple_GET_ITEM(b, i)
        s = x if x >= y else y
        Py_INCREF(s)
        PyTuple_SET_ITEM(out, i, s)
    return out


def expvec_min(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple out = PyTuple_New(n)
    cdef object x, y, s
    for i in range(n):
        x = <object>PyTuple_GET_ITEM(a, i)
        y = <object>PyTuple_GET_ITEM(b, i)
        s = x if x <= y else y
        Py_INCREF(s)
        PyTuple_SET_ITEM(out, i, s)
    return out


def dict_add(dict A, dict B):
    cdef dict out = dict(A)
    cdef object k, v, s
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


def dict_sub(dict A, dict B):
    cdef dict out = dict(A)
    cdef object k, v, s
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


def dict_neg(dict A):
    cdef dict out = {}
    cdef object k, v
    for k, v in A.items():
        out[k] = -v
    return out


def dict_scale(dict A, object c):
    cdef dict out = {}
    cdef object k, v
    if not c:
        return out
    for k, v in A.items():
        out[k] = v * c
    return out


def dict_mul(dict A, dict B):
    cdef dict out = {}
    cdef object ka, va, kb, vb, k, s
    if not A or not B:
        return out
    if len(A) > len(B):
        A, B = B, A
    for ka, va in A.items():
        for kb, vb in B.items():
            k = _tuple_add(<tuple>ka, <tuple>kb)
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


def dict_term_mul(dict A, object c, tuple m):
    cdef dict out = {}
    cdef object k, v
    for k, v in A.items():
        out[_tuple_add(<tuple>k, m)] = v * c
    return out


def dict_axpy(dict P, object c, tuple m, dict B):
    cdef object k, v, key, s
    for k, v in B.items():
        key = _tuple_add(<tuple>k, m)
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


def dict_int_content(dict A):
    cdef object g = 0
    cdef object v
    for v in A.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def dict_div_int(dict A, object g):
    cdef dict out = {}
    cdef object k, v
    for k, v in A.items():
        out[k] = v // g
    return out
