"""Linear-algebra kernels with every scalar operation rounded to a target format.

Kernels accept arbitrary leading batch dimensions, so a whole Monte Carlo
sweep of independent trials runs in one call; within each trial the
operation order is strictly sequential.  Inputs are first rounded to the
target format and the exact reference is computed from those rounded inputs
in double precision.

Accumulation is left to right, products and sums are rounded separately
(no fused multiply-add).  For forward/back substitution and the Doolittle
recurrences the default ``order="sequential"`` subtracts each rounded product
from the running remainder, ``r = fl(r - fl(t_ij x_j))``, then divides;
``order="sum_first"`` accumulates the products first and subtracts once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .formats import make_format, rounder

OP_KINDS = ("mul", "add", "sub", "div")
ORDERS = ("sequential", "sum_first")


class Audit:
    """Bounded record of every relative rounding error ``delta``.

    Keeps the first ``capacity`` values verbatim and reservoir-samples
    beyond that, so memory stays bounded however long the run.
    """

    def __init__(self, capacity: int = 10**7, seed: int = 0):
        self.capacity = int(capacity)
        self.op_index = np.empty(0, dtype=np.int64)
        self.op_kind = np.empty(0, dtype=np.int8)
        self.delta = np.empty(0, dtype=np.float64)
        self.seen = 0
        self.max_abs = 0.0
        self._rng = np.random.default_rng(seed)

    def record(self, kind: str, exact: np.ndarray, rounded: np.ndarray):
        exact = np.ravel(exact)
        rounded = np.ravel(rounded)
        nz = exact != 0
        d = rounded[nz] / exact[nz] - 1.0
        if d.size == 0:
            return
        self.max_abs = max(self.max_abs, float(np.abs(d).max()))
        idx = self.seen + np.flatnonzero(nz)
        code = np.full(d.size, OP_KINDS.index(kind), dtype=np.int8)
        self.seen += exact.size
        room = self.capacity - self.delta.size
        if room > 0:
            take = min(room, d.size)
            self.op_index = np.concatenate([self.op_index, idx[:take]])
            self.op_kind = np.concatenate([self.op_kind, code[:take]])
            self.delta = np.concatenate([self.delta, d[:take]])
            idx, code, d = idx[take:], code[take:], d[take:]
        if d.size:
            # reservoir step: item with global position g replaces a slot with probability capacity/(g+1)
            j = self._rng.integers(0, idx + 1)
            keep = j < self.capacity
            self.op_index[j[keep]] = idx[keep]
            self.op_kind[j[keep]] = code[keep]
            self.delta[j[keep]] = d[keep]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["op_index", "op_kind", "delta"])
            for i, k, d in zip(self.op_index.tolist(), self.op_kind.tolist(), self.delta.tolist()):
                w.writerow([i, OP_KINDS[k], repr(d)])


@dataclass
class RoundedResult:
    """Computed value, exact reference and ``delta = value - exact``."""

    value: np.ndarray
    exact: np.ndarray
    delta: np.ndarray


@dataclass
class LuResult:
    L: np.ndarray
    U: np.ndarray
    L_exact: np.ndarray
    U_exact: np.ndarray

    @property
    def dL(self) -> np.ndarray:
        return self.L - self.L_exact

    @property
    def dU(self) -> np.ndarray:
        return self.U - self.U_exact


class _Fl:
    """Rounding helper bound to a format and an optional audit."""

    def __init__(self, fmt, audit: Audit | None):
        self.fmt = make_format(fmt)
        self._r = rounder(self.fmt)
        self.audit = audit

    def __call__(self, x, kind: str):
        x = np.asarray(x, dtype=np.float64)
        out = self._r(x).reshape(x.shape)
        if self.audit is not None:
            self.audit.record(kind, x, out)
        return out

    def quantize(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self._r(x).reshape(x.shape)


class _CarrierOps:
    """Plain double arithmetic for the exact references."""

    def __call__(self, x, kind):
        return x


_CARRIER = _CarrierOps()


def _check_order(order):
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def _accumulate(fl: _Fl, prods: np.ndarray) -> np.ndarray:
    """Left-to-right rounded sum over the last axis of already-rounded products."""
    p = np.moveaxis(prods, -1, 0)
    acc = p[0].copy()
    for k in range(1, p.shape[0]):
        acc = fl(acc + p[k], "add")
    return acc


def rounded_dot(x, y, fmt, audit: Audit | None = None) -> RoundedResult:
    """``fl(...fl(fl(x1 y1) + fl(x2 y2)) ... + fl(xn yn))`` over the last axis."""
    fl = _Fl(fmt, audit)
    x, y = fl.quantize(x), fl.quantize(y)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"length mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    if x.shape[-1] < 1:
        raise ValueError("need n >= 1")
    value = _accumulate(fl, fl(x * y, "mul"))
    exact = _accumulate(_CARRIER, x * y)
    return RoundedResult(value, exact, value - exact)


def rounded_matvec(A, b, fmt, audit: Audit | None = None) -> RoundedResult:
    """``y_i = rounded_dot(A[i, :], b)`` for each row; ``A`` is ``(..., m, n)``."""
    fl = _Fl(fmt, audit)
    A, b = fl.quantize(A), fl.quantize(b)
    if A.shape[-1] != b.shape[-1]:
        raise ValueError(f"shape mismatch: A has {A.shape[-1]} columns, b has {b.shape[-1]} entries")
    value = _accumulate(fl, fl(A * b[..., None, :], "mul"))
    exact = _accumulate(_CARRIER, A * b[..., None, :])
    return RoundedResult(value, exact, value - exact)


def rounded_matmul(A, B, fmt, audit: Audit | None = None) -> RoundedResult:
    """Column-by-column rounded matrix-vector products; ``A`` is ``(..., m, n)``, ``B`` is ``(..., n, p)``."""
    fl = _Fl(fmt, audit)
    A, B = fl.quantize(A), fl.quantize(B)
    n = A.shape[-1]
    if B.shape[-2] != n:
        raise ValueError(f"shape mismatch: {A.shape[-2:]} @ {B.shape[-2:]}")
    acc = fl(A[..., :, 0, None] * B[..., None, 0, :], "mul")
    for k in range(1, n):
        acc = fl(acc + fl(A[..., :, k, None] * B[..., None, k, :], "mul"), "add")
    exact = A[..., :, 0, None] * B[..., None, 0, :]
    for k in range(1, n):
        exact = exact + A[..., :, k, None] * B[..., None, k, :]
    return RoundedResult(acc, exact, acc - exact)


# ---------------------------------------------------------------------------
# triangular solves and LU
# ---------------------------------------------------------------------------

def _subst(fl, T, b, rows, order):
    x = np.zeros(np.broadcast_shapes(T.shape[:-1], b.shape), dtype=np.float64)
    done = []
    for i in rows:
        d = T[..., i, i]
        if np.any(d == 0):
            raise ZeroDivisionError(f"zero diagonal entry at row {i + 1}")
        if order == "sequential":
            r = b[..., i]
            for j in done:
                r = fl(r - fl(T[..., i, j] * x[..., j], "mul"), "sub")
        else:
            r = b[..., i]
            if done:
                s = fl(T[..., i, done[0]] * x[..., done[0]], "mul")
                for j in done[1:]:
                    s = fl(s + fl(T[..., i, j] * x[..., j], "mul"), "add")
                r = fl(r - s, "sub")
        x[..., i] = fl(r / d, "div")
        done.append(i)
    return x


def rounded_forward_subst(T, b, fmt, audit: Audit | None = None, order: str = "sequential") -> RoundedResult:
    """Solve lower-triangular ``T x = b`` by forward substitution in ``fmt``."""
    _check_order(order)
    fl = _Fl(fmt, audit)
    T, b = fl.quantize(T), fl.quantize(b)
    n = T.shape[-1]
    value = _subst(fl, T, b, range(n), order)
    exact = _subst(_CARRIER, T, b, range(n), order)
    return RoundedResult(value, exact, value - exact)


def rounded_back_subst(U, y, fmt, audit: Audit | None = None, order: str = "sequential") -> RoundedResult:
    """Solve upper-triangular ``U x = y`` by back substitution in ``fmt``."""
    _check_order(order)
    fl = _Fl(fmt, audit)
    U, y = fl.quantize(U), fl.quantize(y)
    n = U.shape[-1]
    value = _subst(fl, U, y, range(n - 1, -1, -1), order)
    exact = _subst(_CARRIER, U, y, range(n - 1, -1, -1), order)
    return RoundedResult(value, exact, value - exact)


def _doolittle(fl, A, order):
    n = A.shape[-1]
    L = np.zeros_like(A)
    U = np.zeros_like(A)
    idx = np.arange(n)
    L[..., idx, idx] = 1.0

    def reduce(r, left, right):
        # r minus sum_i left[i] * right[i], rounded per op in the chosen order
        if not left:
            return r
        if order == "sequential":
            for a, b in zip(left, right):
                r = fl(r - fl(a * b, "mul"), "sub")
            return r
        s = fl(left[0] * right[0], "mul")
        for a, b in zip(left[1:], right[1:]):
            s = fl(s + fl(a * b, "mul"), "add")
        return fl(r - s, "sub")

    for k in range(n):
        # row k of U
        U[..., k, k:] = reduce(A[..., k, k:],
                               [L[..., k, i, None] for i in range(k)],
                               [U[..., i, k:] for i in range(k)])
        piv = U[..., k, k]
        if np.any(piv == 0):
            raise ZeroDivisionError(f"zero pivot u_{k + 1}{k + 1}")
        if k + 1 < n:
            # column k of L
            r = reduce(A[..., k + 1:, k],
                       [L[..., k + 1:, j] for j in range(k)],
                       [U[..., j, k, None] for j in range(k)])
            L[..., k + 1:, k] = fl(r / piv[..., None], "div")
    return L, U


def rounded_lu_doolittle(A, fmt, audit: Audit | None = None, order: str = "sequential") -> LuResult:
    """Unpivoted Doolittle LU, row ``k`` of ``U`` then column ``k`` of ``L``."""
    _check_order(order)
    fl = _Fl(fmt, audit)
    A = fl.quantize(A)
    if A.shape[-1] != A.shape[-2]:
        raise ValueError("A must be square")
    L, U = _doolittle(fl, A, order)
    Le, Ue = _doolittle(_CARRIER, A, order)
    return LuResult(L, U, Le, Ue)


def exact_reference(kernel: str, *inputs, order: str = "sequential"):
    """Carrier-precision result of ``kernel`` for the given inputs (no target rounding)."""
    carrier = make_format("fp64")
    if kernel == "dot":
        return rounded_dot(*inputs, carrier).value
    if kernel == "matvec":
        return rounded_matvec(*inputs, carrier).value
    if kernel == "matmul":
        return rounded_matmul(*inputs, carrier).value
    if kernel == "trisolve":
        return rounded_forward_subst(*inputs, carrier, order=order).value
    if kernel == "backsolve":
        return rounded_back_subst(*inputs, carrier, order=order).value
    if kernel == "lu":
        r = rounded_lu_doolittle(*inputs, carrier, order=order)
        return r.L, r.U
    raise ValueError(f"unknown kernel {kernel!r}")


__all__ = [
    "Audit", "LuResult", "OP_KINDS", "ORDERS", "RoundedResult", "exact_reference",
    "rounded_back_subst", "rounded_dot", "rounded_forward_subst", "rounded_lu_doolittle",
    "rounded_matmul", "rounded_matvec",
]
