"""Truncated multivariate power series over complex coefficients.

A series lives in a fixed dimension d with a per-series truncation order N
(total degree). Multi-indices are plain tuples of nonnegative ints, which
already carry equality and lexicographic order. Absent keys are exact zeros.
Binary operations truncate to the minimum order of the operands; there is no
silent order promotion.

Values are treated as immutable after construction; all operations return new
series.
"""
from __future__ import annotations

import numpy as np

from ._kernels import mul_packed

# Below this many coefficient pairs the plain dict loop beats the packed
# array kernel on call overhead alone.
_PACKED_MUL_CUTOFF = 192


def _validate_key(key, dim, order):
    if len(key) != dim:
        raise ValueError(f"multi-index {key!r} has length {len(key)}, expected {dim}")
    if any((not isinstance(e, int)) or e < 0 for e in key):
        raise ValueError(f"multi-index {key!r} must have nonnegative integer entries")
    if sum(key) > order:
        raise ValueError(f"multi-index {key!r} exceeds truncation order {order}")


class TruncatedSeries:
    __slots__ = ("dim", "order", "_c")

    def __init__(self, dim: int, order: int, coeffs=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if order < 0:
            raise ValueError("order must be >= 0")
        self.dim = dim
        self.order = order
        c = {}
        if coeffs:
            for key, val in coeffs.items():
                key = tuple(key)
                _validate_key(key, dim, order)
                val = complex(val)
                if val != 0:
                    c[key] = val
        self._c = c

    # ---- constructors ----

    @classmethod
    def zero(cls, dim, order):
        return cls(dim, order)

    @classmethod
    def constant(cls, dim, order, value):
        return cls(dim, order, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim, order, axis):
        """The coordinate series x_axis (0-based axis)."""
        if not 0 <= axis < dim:
            raise ValueError(f"axis {axis} out of range for dim {dim}")
        key = tuple(1 if j == axis else 0 for j in range(dim))
        return cls(dim, order, {key: 1.0})

    @classmethod
    def identity_map(cls, dim, order):
        return [cls.variable(dim, order, j) for j in range(dim)]

    # ---- accessors ----

    def coefficient(self, key) -> complex:
        return self._c.get(tuple(key), 0j)

    @property
    def constant_term(self) -> complex:
        return self._c.get((0,) * self.dim, 0j)

    def items(self):
        return self._c.items()

    def __len__(self):
        return len(self._c)

    def max_abs(self) -> float:
        return max((abs(v) for v in self._c.values()), default=0.0)

    def __repr__(self):
        terms = sorted(self._c.items())[:6]
        body = ", ".join(f"{k}: {v:.6g}" for k, v in terms)
        more = "" if len(self._c) <= 6 else f", ... ({len(self._c)} terms)"
        return f"TruncatedSeries(d={self.dim}, N={self.order}, {{{body}{more}}})"

    # ---- structural helpers ----

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            if order == self.order:
                return self
            raise ValueError("truncate cannot raise the order")
        c = {k: v for k, v in self._c.items() if sum(k) <= order}
        out = TruncatedSeries(self.dim, order)
        out._c = c
        return out

    def clean(self, rel_tol: float = 1e-14) -> "TruncatedSeries":
        """Drop coefficients below rel_tol * (largest magnitude)."""
        m = self.max_abs()
        if m == 0.0:
            return self
        cut = rel_tol * m
        c = {k: v for k, v in self._c.items() if abs(v) > cut}
        out = TruncatedSeries(self.dim, self.order)
        out._c = c
        return out

    def _check_dim(self, other):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    # ---- ring operations ----

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TruncatedSeries.constant(self.dim, self.order, other)
        self._check_dim(other)
        order = min(self.order, other.order)
        c = {k: v for k, v in self._c.items() if sum(k) <= order}
        for k, v in other._c.items():
            if sum(k) <= order:
                s = c.get(k, 0j) + v
                if s == 0:
                    c.pop(k, None)
                else:
                    c[k] = s
        out = TruncatedSeries(self.dim, order)
        out._c = c
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TruncatedSeries(self.dim, self.order)
        out._c = {k: -v for k, v in self._c.items()}
        return out

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "TruncatedSeries":
        factor = complex(factor)
        out = TruncatedSeries(self.dim, self.order)
        if factor != 0:
            out._c = {k: factor * v for k, v in self._c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        self._check_dim(other)
        order = min(self.order, other.order)
        if (len(self._c) * len(other._c) >= _PACKED_MUL_CUTOFF
                and (order + 1) ** self.dim <= 300_000):
            return self._mul_packed(other, order)
        return self._mul_dict(other, order)

    __rmul__ = __mul__

    def _mul_dict(self, other, order):
        # Cauchy product grouped by total degree so incompatible degree pairs
        # are skipped wholesale.
        ga = _by_degree(self._c)
        gb = _by_degree(other._c)
        c = {}
        for da, items_a in ga.items():
            if da > order:
                continue
            for db, items_b in gb.items():
                if da + db > order:
                    continue
                for ka, va in items_a:
                    for kb, vb in items_b:
                        k = tuple(x + y for x, y in zip(ka, kb))
                        c[k] = c.get(k, 0j) + va * vb
        out = TruncatedSeries(self.dim, order)
        out._c = {k: v for k, v in c.items() if v != 0}
        return out

    def _mul_packed(self, other, order):
        ea, ca = _pack(self)
        eb, cb = _pack(other)
        ec, cc = mul_packed(ea, ca, eb, cb, order)
        out = TruncatedSeries(self.dim, order)
        out._c = {tuple(int(e) for e in ec[i]): complex(cc[i])
                  for i in range(len(cc)) if cc[i] != 0}
        return out

    def power(self, n: int) -> "TruncatedSeries":
        if n < 0:
            raise ValueError("power expects n >= 0; use reciprocal for n < 0")
        result = TruncatedSeries.constant(self.dim, self.order, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # ---- calculus ----

    def diff(self, axis: int) -> "TruncatedSeries":
        """Formal partial derivative; the truncation order drops by 1."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        if self.order == 0:
            return TruncatedSeries.zero(self.dim, 0)
        c = {}
        for k, v in self._c.items():
            e = k[axis]
            if e:
                kk = k[:axis] + (e - 1,) + k[axis + 1:]
                c[kk] = e * v
        out = TruncatedSeries(self.dim, self.order - 1)
        out._c = c
        return out

    def eval(self, point) -> complex:
        point = [complex(z) for z in point]
        if len(point) != self.dim:
            raise ValueError(f"point has length {len(point)}, expected {self.dim}")
        pows = [{0: 1.0 + 0j} for _ in range(self.dim)]

        def p(j, e):
            tab = pows[j]
            if e not in tab:
                tab[e] = tab[e - 1] * point[j] if e - 1 in tab else point[j] ** e
            return tab[e]

        total = 0j
        for k in sorted(self._c):
            term = self._c[k]
            for j, e in enumerate(k):
                if e:
                    term *= p(j, e)
            total += term
        return total


def _by_degree(coeffs):
    g = {}
    for k, v in coeffs.items():
        g.setdefault(sum(k), []).append((k, v))
    return g


def _pack(s: TruncatedSeries):
    n = len(s._c)
    exps = np.empty((n, s.dim), dtype=np.int64)
    coefs = np.empty(n, dtype=np.complex128)
    for i, (k, v) in enumerate(s._c.items()):
        exps[i] = k
        coefs[i] = v
    return exps, coefs


# ---- composition and inversion ----

def compose(outer: TruncatedSeries, inners) -> TruncatedSeries:
    return compose_map([outer], inners)[0]

def compose_map(outers, inners):
    """Compose several series with one common inner map.

    The monomial power products of the inner map are built once and shared
    across all outer series, which is what makes repeated map composition
    (inversion, residual checks) affordable at d=3, N=8.
    """
    inners = list(inners)
    d_in = len(inners)
    for o in outers:
        if o.dim != d_in:
            raise ValueError(f"outer dim {o.dim} != number of inner series {d_in}")
    dim = inners[0].dim
    for f in inners:
        if f.dim != dim:
            raise ValueError("inner series disagree on dimension")
        if f.constant_term != 0:
            raise ValueError("inner series must have zero constant term")
    order = min(min(o.order for o in outers), min(f.order for f in inners))
    inners = [f.truncate(order) if f.order > order else f for f in inners]

    one = TruncatedSeries.constant(dim, order, 1.0)
    cache = {(0,) * d_in: one}

    def monomial(key):
        s = cache.get(key)
        if s is not None:
            return s
        j = next(i for i, e in enumerate(key) if e)
        prev = key[:j] + (key[j] - 1,) + key[j + 1:]
        s = monomial(prev) * inners[j]
        cache[key] = s
        return s

    zero_out = (0,) * dim
    results = []
    for o in outers:
        acc = {}
        for key, cval in o.items():
            if sum(key) > order:
                continue
            if not any(key):
                acc[zero_out] = acc.get(zero_out, 0j) + cval
                continue
            for mk, mv in monomial(key).items():
                s = acc.get(mk, 0j) + cval * mv
                acc[mk] = s
        r = TruncatedSeries(dim, order)
        r._c = {k: v for k, v in acc.items() if v != 0}
        results.append(r)
    return results


def linear_matrix(fs) -> np.ndarray:
    """Degree-1 coefficient matrix L[i][j] = coefficient of x_j in fs[i]."""
    d = len(fs)
    L = np.zeros((d, d), dtype=complex)
    for i, f in enumerate(fs):
        if f.dim != d:
            raise ValueError("map must be square (d series in d variables)")
        for j in range(d):
            key = tuple(1 if a == j else 0 for a in range(d))
            L[i, j] = f.coefficient(key)
    return L


def invert_map(fs):
    """Compositional inverse of a map with zero constant term.

    Solved degree by degree: with L the linear part, the update
    g <- g - L^{-1} (f(g) - id) gains one exact degree per pass.
    """
    fs = list(fs)
    d = len(fs)
    order = min(f.order for f in fs)
    for f in fs:
        if f.dim != d:
            raise ValueError("invert_map needs d series in d variables")
        if f.constant_term != 0:
            raise ValueError("invert_map requires zero constant terms")
    L = linear_matrix(fs)
    if abs(np.linalg.det(L)) < 1e-13 * max(1.0, np.abs(L).max()) ** d:
        raise ValueError("singular linear part; map is not invertible")
    Linv = np.linalg.inv(L)

    ident = TruncatedSeries.identity_map(d, order)
    g = []
    for i in range(d):
        gi = TruncatedSeries.zero(d, order)
        for j in range(d):
            if Linv[i, j] != 0:
                gi = gi + ident[j].scale(Linv[i, j])
        g.append(gi)
    if order == 1:
        return g

    for m in range(2, order + 1):
        fg = compose_map([f.truncate(m) if f.order > m else f for f in fs],
                         [gi.truncate(m) for gi in g])
        defect = [fg[i] - ident[i].truncate(m) for i in range(d)]
        for i in range(d):
            corr = TruncatedSeries.zero(d, order)
            for j in range(d):
                if Linv[i, j] != 0:
                    corr = corr + _promote(defect[j], order).scale(Linv[i, j])
            g[i] = g[i] - corr
    return g


def _promote(s: TruncatedSeries, order: int) -> TruncatedSeries:
    """Reinterpret a series at a higher truncation order (internal; callers
    guarantee the dropped tail is not claimed as exact)."""
    if s.order >= order:
        return s.truncate(order) if s.order > order else s
    out = TruncatedSeries(s.dim, order)
    out._c = dict(s._c)
    return out


def _unit_compose(maclaurin, f: TruncatedSeries) -> TruncatedSeries:
    """Compose a 1-D Maclaurin coefficient list with a zero-constant series."""
    out = TruncatedSeries.constant(f.dim, f.order, maclaurin[0])
    p = None
    for k in range(1, min(len(maclaurin), f.order + 1)):
        p = f if p is None else p * f
        if maclaurin[k] != 0:
            out = out + p.scale(maclaurin[k])
    return out


def reciprocal(f: TruncatedSeries) -> TruncatedSeries:
    c = f.constant_term
    if c == 0:
        raise ValueError("reciprocal requires a nonzero constant term")
    g = (f - c).scale(1.0 / c)
    coeffs = [(-1.0) ** k for k in range(f.order + 1)]
    return _unit_compose(coeffs, g).scale(1.0 / c)


def sqrt_series(f: TruncatedSeries, branch_of_constant=None) -> TruncatedSeries:
    """Series square root with g(0) = branch_of_constant.

    branch_of_constant must square to f(0); by default the principal root of
    f(0) is taken. The binomial series for (1+u)^(1/2) is composed with
    u = (f - f(0))/f(0).
    """
    c = f.constant_term
    if c == 0:
        raise ValueError("sqrt_series requires a nonzero constant term")
    if branch_of_constant is None:
        branch_of_constant = np.sqrt(complex(c))
    else:
        branch_of_constant = complex(branch_of_constant)
        if abs(branch_of_constant * branch_of_constant - c) > 1e-10 * abs(c):
            raise ValueError("branch value does not square to the constant term")
    g = (f - c).scale(1.0 / c)
    # (1+u)^{1/2}: coefficients binom(1/2, k)
    coeffs = [1.0]
    for k in range(1, f.order + 1):
        coeffs.append(coeffs[-1] * (0.5 - (k - 1)) / k)
    return _unit_compose(coeffs, g).scale(branch_of_constant)


def max_abs_diff(a: TruncatedSeries, b: TruncatedSeries) -> float:
    keys = set(a._c) | set(b._c)
    return max((abs(a.coefficient(k) - b.coefficient(k)) for k in keys), default=0.0)
