# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: packed series product and expression-program eval.

Opcode values mirror opcodes.py; keep both in sync.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csqrt(double complex)
    double complex csin(double complex)
    double complex ccos(double complex)

DEF MAX_STACK = 64


def mul_packed(cnp.int64_t[:, ::1] exps_a, double complex[::1] coefs_a,
               cnp.int64_t[:, ::1] exps_b, double complex[::1] coefs_b,
               long order):
    """Truncated Cauchy product of packed sparse series.

    Accumulates into a dense scratch table indexed by base-(order+1) packed
    exponents; per-axis exponents of retained terms never exceed the order.
    """
    cdef Py_ssize_t ka = exps_a.shape[0]
    cdef Py_ssize_t kb = exps_b.shape[0]
    cdef int d = exps_a.shape[1]
    cdef long base = order + 1
    cdef long size = 1
    cdef int j
    for j in range(d):
        size *= base

    scratch_arr = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] scratch = scratch_arr
    deg_a_arr = np.asarray(exps_a).sum(axis=1)
    deg_b_arr = np.asarray(exps_b).sum(axis=1)
    cdef cnp.int64_t[::1] deg_a = deg_a_arr
    cdef cnp.int64_t[::1] deg_b = deg_b_arr

    key_a_arr = np.zeros(ka, dtype=np.int64)
    cdef cnp.int64_t[::1] key_a = key_a_arr
    key_b_arr = np.zeros(kb, dtype=np.int64)
    cdef cnp.int64_t[::1] key_b = key_b_arr
    cdef Py_ssize_t i
    cdef long key
    for i in range(ka):
        key = 0
        for j in range(d):
            key = key * base + exps_a[i, j]
        key_a[i] = key
    for i in range(kb):
        key = 0
        for j in range(d):
            key = key * base + exps_b[i, j]
        key_b[i] = key

    cdef Py_ssize_t p, q
    cdef long da
    cdef double complex va
    with nogil:
        for p in range(ka):
            da = deg_a[p]
            if da > order:
                continue
            va = coefs_a[p]
            for q in range(kb):
                if da + deg_b[q] > order:
                    continue
                scratch[key_a[p] + key_b[q]] = scratch[key_a[p] + key_b[q]] + va * coefs_b[q]

    nz = np.nonzero(scratch_arr)[0]
    coefs = scratch_arr[nz]
    exps = np.empty((nz.size, d), dtype=np.int64)
    rem = nz
    for j in range(d - 1, -1, -1):
        exps[:, j] = rem % base
        rem = rem // base
    return exps, coefs


cdef inline double complex ipow(double complex x, long n) nogil:
    cdef double complex result = 1.0
    cdef double complex b = x
    cdef long m = n
    if m < 0:
        m = -m
    while m:
        if m & 1:
            result = result * b
        m >>= 1
        if m:
            b = b * b
    if n < 0:
        return 1.0 / result
    return result


def eval_program(cnp.int64_t[::1] ops, cnp.int64_t[::1] args,
                 double complex[::1] consts,
                 double complex[:, ::1] points):
    """Run a postfix program over a batch of points; one C stack per point."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_ops = ops.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex stack[MAX_STACK]
    cdef Py_ssize_t i, k
    cdef int sp
    cdef long op, a

    # the depth trajectory is data independent, so validate it once up front
    depth = 0
    max_depth = 0
    for k in range(n_ops):
        op = ops[k]
        if op <= 1:
            depth += 1
        elif 2 <= op <= 5:
            depth -= 1
            if depth < 1:
                raise ValueError("malformed program: stack underflow")
        elif 6 <= op <= 12:
            if depth < 1:
                raise ValueError("malformed program: stack underflow")
        else:
            raise ValueError(f"unknown opcode {op}")
        if depth > max_depth:
            max_depth = depth
    if depth != 1:
        raise ValueError("malformed program: stack depth != 1 at end")
    if max_depth > MAX_STACK:
        raise ValueError("program stack depth exceeds compiled limit")

    with nogil:
        for i in range(n):
            sp = 0
            for k in range(n_ops):
                op = ops[k]
                a = args[k]
                if op == 0:      # CONST
                    stack[sp] = consts[a]
                    sp += 1
                elif op == 1:    # VAR
                    stack[sp] = points[i, a]
                    sp += 1
                elif op == 2:    # ADD
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] + stack[sp]
                elif op == 3:    # SUB
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] - stack[sp]
                elif op == 4:    # MUL
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] * stack[sp]
                elif op == 5:    # DIV
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] / stack[sp]
                elif op == 6:    # NEG
                    stack[sp - 1] = -stack[sp - 1]
                elif op == 7:    # POWI
                    stack[sp - 1] = ipow(stack[sp - 1], a)
                elif op == 8:    # EXP
                    stack[sp - 1] = cexp(stack[sp - 1])
                elif op == 9:    # LOG
                    stack[sp - 1] = clog(stack[sp - 1])
                elif op == 10:   # SQRT
                    stack[sp - 1] = csqrt(stack[sp - 1])
                elif op == 11:   # SIN
                    stack[sp - 1] = csin(stack[sp - 1])
                elif op == 12:   # COS
                    stack[sp - 1] = ccos(stack[sp - 1])
            out[i] = stack[0]
    return out_arr
