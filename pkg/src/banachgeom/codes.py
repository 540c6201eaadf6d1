"""Seminorm codes: rational finite-support vectors, the canonical
enumeration of that space, and seminorms mu(v) = norm(sum a_n x_n) built
from a presented space plus a deterministic dense-vector rule.

The enumeration of V is the diagonal one: vectors are grouped into shells
by size S = max(largest support index, largest coefficient height), where
the height of a reduced fraction p/q is max(|p|, q). Inside a shell,
tuples are ordered by support size, then total coefficient height, then
lexicographically with fractions in value order, so sparse simple vectors
lead each shell. The zero vector is shell 0 and sits first. Every module
that quantifies over V uses this single order.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import DimensionMismatch, BanachGeomError
from .spaces import norm_eval

__all__ = [
    "QVec",
    "ZERO_QVEC",
    "qvec",
    "basis_qvec",
    "enumerate_qvecs",
    "enumeration_position",
    "SeminormCode",
    "encode_space",
    "seminorm_eval",
    "kernel_test",
    "classify_code",
    "code_distance",
    "B_LIKE",
    "P_INF_ONLY",
    "DEGENERATE",
    "prefix_dense",
]

B_LIKE = "B-like"
P_INF_ONLY = "P_inf-only"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class QVec:
    """Finitely supported rational sequence over the canonical basis.

    items holds (index, coefficient) pairs with 1-based strictly increasing
    indices and no explicit zeros; the empty tuple is the zero vector.
    """

    items: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        last = 0
        for idx, coef in self.items:
            if idx <= last:
                raise BanachGeomError("QVec indices must be strictly increasing")
            if coef == 0:
                raise BanachGeomError("QVec must not store zero coefficients")
            last = idx

    @property
    def is_zero(self):
        return not self.items

    @property
    def max_index(self):
        return self.items[-1][0] if self.items else 0

    def coeff(self, idx):
        for i, c in self.items:
            if i == idx:
                return c
        return Fraction(0)

    def dense(self, width=None):
        width = self.max_index if width is None else width
        if self.max_index > width:
            raise DimensionMismatch(f"support reaches index {self.max_index} > width {width}")
        out = np.zeros(width, dtype=np.float64)
        for i, c in self.items:
            out[i - 1] = float(c)
        return out

    def __add__(self, other):
        acc = {i: c for i, c in self.items}
        for i, c in other.items:
            acc[i] = acc.get(i, Fraction(0)) + c
        return qvec(acc)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QVec(tuple((i, -c) for i, c in self.items))

    def scale(self, q):
        q = Fraction(q)
        if q == 0:
            return ZERO_QVEC
        return QVec(tuple((i, c * q) for i, c in self.items))

    def __str__(self):
        if self.is_zero:
            return "0"
        return "+".join(f"({c})e{i}" for i, c in self.items).replace("+(-", "-(")


ZERO_QVEC = QVec()


def qvec(entries):
    """QVec from a dict/iterable of (index, coefficient); zeros dropped."""
    if isinstance(entries, dict):
        entries = entries.items()
    items = tuple(
        (int(i), Fraction(c)) for i, c in sorted(entries, key=lambda t: t[0]) if Fraction(c) != 0
    )
    return QVec(items)


def basis_qvec(i):
    return QVec(((int(i), Fraction(1)),))


def _height(q: Fraction) -> int:
    if q == 0:
        return 0
    return max(abs(q.numerator), q.denominator)


@lru_cache(maxsize=None)
def _rationals_up_to(h):
    """All fractions of height <= h (0 included), ascending by value."""
    out = {Fraction(0)}
    for den in range(1, h + 1):
        for num in range(-h, h + 1):
            f = Fraction(num, den)
            if _height(f) <= h:
                out.add(f)
    return tuple(sorted(out))


def _shell(vec_tuple):
    s = 0
    for pos, coef in enumerate(vec_tuple, start=1):
        if coef != 0:
            s = max(s, pos, _height(coef))
    return s


_ENUM: list[QVec] = [ZERO_QVEC]
_ENUM_SHELL = 0
_ENUM_LOCK = threading.Lock()


def _shell_key(tup):
    nnz = sum(1 for c in tup if c != 0)
    weight = sum(_height(c) for c in tup)
    return (nnz, weight, tup)


def _extend_enumeration(target):
    global _ENUM_SHELL
    while len(_ENUM) < target:
        shell = _ENUM_SHELL + 1
        ladder = _rationals_up_to(shell)
        batch = [tup for tup in product(ladder, repeat=shell) if _shell(tup) == shell]
        batch.sort(key=_shell_key)
        _ENUM.extend(qvec(enumerate(tup, start=1)) for tup in batch)
        _ENUM_SHELL = shell


def enumerate_qvecs(n):
    """First n elements of the canonical enumeration (zero vector first)."""
    if len(_ENUM) < n:
        with _ENUM_LOCK:
            _extend_enumeration(n)
    return _ENUM[:n]


def enumeration_position(v: QVec, search_limit=100000):
    """1-based position of v in the enumeration."""
    probe = len(_ENUM)
    while probe <= search_limit:
        pool = enumerate_qvecs(probe)
        try:
            return pool.index(v) + 1
        except ValueError:
            probe = max(probe * 4, 64)
    raise BanachGeomError("enumeration position not found within search limit")


def prefix_dense(n, width=None):
    """Dense coefficient matrix of the first n enumerated QVecs."""
    qs = enumerate_qvecs(n)
    width = width or max(1, max(v.max_index for v in qs))
    out = np.zeros((n, width))
    for r, v in enumerate(qs):
        out[r, : v.max_index] = v.dense(v.max_index) if v.max_index else 0.0
    return out


# ---------------------------------------------------------------------------
# seminorm codes


class SeminormCode:
    """mu(v) = norm(sum a_n x_n) for a deterministic vector rule n -> x_n.

    Rules:
      basis      x_n cycles through the canonical basis of the space
      ball-grid  x_n walks the canonical enumeration of rational vectors of
                 the space, scaled onto the unit ball
      custom     explicit head list, then the basis cycle as tail
      zero       every x_n is zero (degenerate by construction)
    """

    def __init__(self, space, rule="basis", vectors=None):
        self.space = space
        self.rule = rule
        if rule not in ("basis", "ball-grid", "custom", "zero"):
            raise BanachGeomError(f"unknown dense rule {rule!r}")
        self.vectors = None
        if vectors is not None:
            vecs = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
            if vecs.shape[1] != space.dim:
                raise DimensionMismatch("custom rule vectors must match the space dimension")
            self.vectors = vecs
        if rule == "custom" and self.vectors is None:
            raise BanachGeomError("custom rule needs an explicit vector list")
        self._matrix = np.empty((space.dim, 0))
        self._ball_grid_cache = []

    def label(self):
        return f"{self.space.label()}|{self.rule}"

    def vector(self, n):
        """The n-th dense-rule vector (1-based)."""
        return self.matrix(n)[:, n - 1]

    def matrix(self, width):
        if self._matrix.shape[1] < width:
            cols = [self._column(n) for n in range(self._matrix.shape[1] + 1, width + 1)]
            self._matrix = np.hstack([self._matrix, np.column_stack(cols)])
        return self._matrix[:, :width]

    def _column(self, n):
        d = self.space.dim
        if self.rule == "zero":
            return np.zeros(d)
        if self.rule == "custom" and n <= len(self.vectors):
            return self.vectors[n - 1]
        if self.rule == "ball-grid":
            return self._ball_grid(n)
        e = np.zeros(d)
        e[(n - 1) % d] = 1.0
        return e

    def _ball_grid(self, n):
        while len(self._ball_grid_cache) < n:
            probe = 64
            while True:
                pool = [v for v in enumerate_qvecs(probe) if 0 < v.max_index <= self.space.dim]
                if len(pool) >= n:
                    break
                probe *= 4
            self._ball_grid_cache = []
            for v in pool[:n]:
                x = v.dense(self.space.dim)
                nx = norm_eval(self.space, x)
                self._ball_grid_cache.append(x / max(1.0, nx))
        return self._ball_grid_cache[n - 1]

    def eval_qvec(self, v: QVec) -> float:
        if v.is_zero:
            return 0.0
        return self.eval_real(v.dense(v.max_index))

    def eval_real(self, coeffs) -> float:
        """Extension of mu to real coefficient vectors (truncated)."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        A = self.matrix(len(coeffs))
        return float(norm_eval(self.space, A @ coeffs))

    def truncation(self, width):
        """(A, base) with mu(a) = norm_base(A a) on coefficient width."""
        return self.matrix(width), self.space


def encode_space(space, rule="basis", vectors=None):
    """Codify a presented space as a seminorm on V."""
    return SeminormCode(space, rule=rule, vectors=vectors)


def seminorm_eval(code, v: QVec) -> float:
    return code.eval_qvec(v)


def kernel_test(code, v: QVec, tol=1e-12) -> bool:
    """True iff mu(v) vanishes within tol."""
    if tol <= 0:
        raise BanachGeomError("kernel_test needs tol > 0")
    return seminorm_eval(code, v) <= tol


def classify_code(code, level, tol=1e-9, with_info=False):
    """Level-indexed trichotomy of a code restricted to span{e_1..e_level}.

    B-like when no nonzero rational vector on the first `level` indices is
    in the kernel (the truncation matrix has full column rank, checked by
    minimising mu over the coefficient sphere); otherwise the verdict
    depends on the dimension of the surviving quotient.
    """
    if level < 1:
        raise BanachGeomError("classification level must be >= 1")
    A, base = code.truncation(level)
    A = np.asarray(A, dtype=np.float64)
    if not np.any(np.abs(A) > tol):
        return (DEGENERATE, {"rank": 0, "min_mu": 0.0}) if with_info else DEGENERATE
    s = np.linalg.svd(A, compute_uv=False)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(1.0, scale)))
    if rank == level:
        u, sv, vt = np.linalg.svd(A)
        min_mu = float(norm_eval(base, A @ vt[-1]))
        tag = B_LIKE if min_mu > tol else P_INF_ONLY
    else:
        min_mu = 0.0
        tag = P_INF_ONLY if rank >= 1 else DEGENERATE
    if with_info:
        return tag, {"rank": rank, "min_mu": min_mu}
    return tag


def code_distance(a, b, enumeration=None, depth=20):
    """Product-topology distance at finite depth:
    sum_{i<=depth} 2^-i min(1, |a(v_i) - b(v_i)|)."""
    if depth < 1:
        raise BanachGeomError("depth must be >= 1")
    vs = enumeration if enumeration is not None else enumerate_qvecs(depth)
    total = 0.0
    for i, v in enumerate(vs[:depth], start=1):
        gap = abs(a.eval_qvec(v) - b.eval_qvec(v))
        total += 2.0**-i * min(1.0, gap)
    return total
