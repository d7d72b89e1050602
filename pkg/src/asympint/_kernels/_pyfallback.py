"""NumPy fallback for the hot kernels (series product, program evaluation).

Same contracts as the compiled module; vectorized over coefficient pairs and
point batches rather than looping in C.
"""
from __future__ import annotations

import numpy as np

from .opcodes import (OP_ADD, OP_CONST, OP_COS, OP_DIV, OP_EXP, OP_LOG,
                      OP_MUL, OP_NEG, OP_POWI, OP_SIN, OP_SQRT, OP_SUB,
                      OP_VAR)


def mul_packed(exps_a, coefs_a, exps_b, coefs_b, order):
    """Cauchy product of packed sparse series, truncated at total degree order.

    exps_*: (K, d) int64 exponent rows; coefs_*: (K,) complex128.
    Returns (exps, coefs) for the nonzero product terms.
    """
    d = exps_a.shape[1]
    da = exps_a.sum(axis=1)
    db = exps_b.sum(axis=1)
    ia, ib = np.nonzero(da[:, None] + db[None, :] <= order)
    if ia.size == 0:
        return np.empty((0, d), dtype=np.int64), np.empty(0, dtype=np.complex128)
    sums = exps_a[ia] + exps_b[ib]
    vals = coefs_a[ia] * coefs_b[ib]
    base = order + 1
    keys = sums[:, 0].astype(np.int64)
    for j in range(1, d):
        keys = keys * base + sums[:, j]
    scratch = np.zeros(base**d, dtype=np.complex128)
    np.add.at(scratch, keys, vals)
    nz = np.nonzero(scratch)[0]
    coefs = scratch[nz]
    exps = np.empty((nz.size, d), dtype=np.int64)
    rem = nz
    for j in range(d - 1, -1, -1):
        exps[:, j] = rem % base
        rem = rem // base
    return exps, coefs


def _ipow(x, n):
    if n == 0:
        return np.ones_like(x)
    if n < 0:
        return 1.0 / _ipow(x, -n)
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def eval_program(ops, args, consts, points):
    """Run a postfix program over a batch of points.

    ops/args: (P,) int64; consts: (C,) complex128; points: (n, d) complex128.
    Returns the (n,) complex result array.
    """
    n = points.shape[0]
    stack = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for op, a in zip(ops, args):
            if op == OP_CONST:
                stack.append(np.full(n, consts[a], dtype=np.complex128))
            elif op == OP_VAR:
                stack.append(np.array(points[:, a], dtype=np.complex128))
            elif op == OP_ADD:
                b = stack.pop()
                stack[-1] = stack[-1] + b
            elif op == OP_SUB:
                b = stack.pop()
                stack[-1] = stack[-1] - b
            elif op == OP_MUL:
                b = stack.pop()
                stack[-1] = stack[-1] * b
            elif op == OP_DIV:
                b = stack.pop()
                stack[-1] = stack[-1] / b
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_POWI:
                stack[-1] = _ipow(stack[-1], int(a))
            elif op == OP_EXP:
                stack[-1] = np.exp(stack[-1])
            elif op == OP_LOG:
                stack[-1] = np.log(stack[-1])
            elif op == OP_SQRT:
                stack[-1] = np.sqrt(stack[-1])
            elif op == OP_SIN:
                stack[-1] = np.sin(stack[-1])
            elif op == OP_COS:
                stack[-1] = np.cos(stack[-1])
            else:
                raise ValueError(f"unknown opcode {op}")
    if len(stack) != 1:
        raise ValueError("malformed program: stack depth != 1 at end")
    return stack[0]
