"""Norms on finite sequences of matrices.

A block vector is a stack of K same-sized complex matrices, shape (K, n, n),
representing a truncated element of S^p(l2_c) / S^p(l2_r).  The column norm
is ``|| (sum_k x_k^* x_k)^(1/2) ||_p``, the row norm uses ``x_k x_k^*``.

For p >= 2 the rad norm is max(column, row).  For p < 2 it is the infimum of
``col(u) + row(v)`` over decompositions ``u + v = x``; that infimum is not
computed exactly but bracketed: an upper bound from convex minimization over
``v`` (witness returned) and a lower bound from the dual characterization
``sup |<x, y>| / max(col_{p*}(y), row_{p*}(y))``.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np

from . import rng as rngmod
from .matcore import conjugate_exponent, schatten_from_singular_values

__all__ = [
    "as_block_vec",
    "column_gram",
    "row_gram",
    "column_norm",
    "row_norm",
    "column_norm_grad",
    "row_norm_grad",
    "RadBracket",
    "rad_norm_bracket",
    "duality_check",
    "regular_norm",
    "op_matrix_apply",
]


def as_block_vec(x, name: str = "block vector") -> np.ndarray:
    b = np.asarray(x, dtype=complex)
    if b.ndim == 2:
        b = b[None, :, :]
    if b.ndim != 3 or b.shape[1] != b.shape[2] or b.shape[0] == 0:
        raise ValueError(f"{name} must have shape (K, n, n) with K >= 1, got {b.shape}")
    if not (np.all(np.isfinite(b.real)) and np.all(np.isfinite(b.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return b


def _column_gram(b: np.ndarray) -> np.ndarray:
    # sum_k x_k^* x_k = X^H X for the vertical stack X of shape (K n, n)
    k, n, _ = b.shape
    stack = b.reshape(k * n, n)
    s = stack.conj().T @ stack
    return (s + s.conj().T) / 2.0


def _row_gram(b: np.ndarray) -> np.ndarray:
    # sum_k x_k x_k^* = Y Y^H for the horizontal stack Y of shape (n, K n)
    k, n, _ = b.shape
    stack = b.transpose(1, 0, 2).reshape(n, k * n)
    s = stack @ stack.conj().T
    return (s + s.conj().T) / 2.0


def column_gram(x) -> np.ndarray:
    """sum_k x_k^* x_k (positive semidefinite)."""
    return _column_gram(as_block_vec(x))


def row_gram(x) -> np.ndarray:
    """sum_k x_k x_k^*."""
    return _row_gram(as_block_vec(x))


def _gram_norm(s: np.ndarray, p: float) -> float:
    w = np.clip(np.linalg.eigvalsh(s), 0.0, None)
    sv = np.sqrt(w)[::-1]
    return schatten_from_singular_values(sv, p)


def column_norm(x, p) -> float:
    """|| (sum_k x_k^* x_k)^(1/2) ||_{S^p}."""
    return _gram_norm(column_gram(x), float(getattr(p, "p", p)))


def row_norm(x, p) -> float:
    """|| (sum_k x_k x_k^*)^(1/2) ||_{S^p}."""
    return _gram_norm(row_gram(x), float(getattr(p, "p", p)))


def _column_norm_fast(b: np.ndarray, p: float) -> float:
    return _gram_norm(_column_gram(b), p)


def _row_norm_fast(b: np.ndarray, p: float) -> float:
    return _gram_norm(_row_gram(b), p)


# ---------------------------------------------------------------------------
# gradients (Wirtinger, for the real pairing Re Tr(a^* b)); eps smooths the
# eigenvalues so the p < 2 case has bounded derivatives at rank deficiency
# ---------------------------------------------------------------------------


def column_norm_grad(blocks: np.ndarray, p: float, eps: float = 0.0):
    s = _column_gram(blocks)
    w, u = np.linalg.eigh(s)
    w = np.clip(w, 0.0, None) + eps
    val = float(np.sum(w ** (p / 2.0))) ** (1.0 / p) if w.size else 0.0
    if val <= 0.0:
        return 0.0, np.zeros_like(blocks)
    m = (u * (w ** (p / 2.0 - 1.0))) @ u.conj().T * (val ** (1.0 - p) / 2.0)
    grad = 2.0 * (blocks @ m)
    return val, grad


def row_norm_grad(blocks: np.ndarray, p: float, eps: float = 0.0):
    v, g = column_norm_grad(np.conj(np.transpose(blocks, (0, 2, 1))), p, eps)
    return v, np.conj(np.transpose(g, (0, 2, 1)))


@dataclasses.dataclass
class RadBracket:
    lower: float
    upper: float
    witness_u: Optional[np.ndarray]
    witness_v: Optional[np.ndarray]
    converged: bool
    iterations: int

    @property
    def gap(self) -> float:
        if self.upper <= 0.0:
            return 0.0
        return (self.upper - self.lower) / self.upper


def _pair(x: np.ndarray, y: np.ndarray) -> complex:
    # sum_k Tr(x_k y_k), bilinear
    return complex(np.einsum("kij,kji->", x, y))


def _dual_value(x: np.ndarray, y: np.ndarray, pc: float) -> float:
    den = max(_column_norm_fast(y, pc), _row_norm_fast(y, pc))
    if den <= 0.0:
        return 0.0
    return abs(_pair(x, y)) / den


def _dual_ascent(x: np.ndarray, y0: np.ndarray, pc: float, steps: int) -> float:
    y = y0.copy()
    best = _dual_value(x, y, pc)
    gnum = np.conj(np.transpose(x, (0, 2, 1)))  # ascent direction of sum Tr(x_k y_k)
    for it in range(steps):
        num = _pair(x, y)
        cd, gc = column_norm_grad(y, pc, 1e-12)
        rd, gr = row_norm_grad(y, pc, 1e-12)
        den = max(cd, rd)
        if den <= 0.0:
            break
        val = abs(num) / den
        best = max(best, val)
        phase = num / abs(num) if num != 0 else 1.0
        gden = gc if cd >= rd else gr
        g = phase * gnum - val * gden
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        y = y + (0.3 / math.sqrt(it + 1.0)) * (den / gn) * g
    return max(best, _dual_value(x, y, pc))


def rad_norm_bracket(
    x,
    p,
    tol: float = 1e-3,
    max_iter: int = 5000,
    seed: int = 0,
    dual_starts: int = 64,
    dual_steps: int = 120,
) -> RadBracket:
    """Bracket for the rad norm of a block vector.

    For p >= 2 returns the exact max(column, row) with lower == upper.  For
    1 < p < 2 returns ``lower <= inf{col(u) + row(v) : u + v = x} <= upper``;
    the minimization stops once the relative gap reaches ``tol`` or the
    iteration cap is hit (then ``converged`` is False, never a wrong claim
    of exactness).
    """
    b = as_block_vec(x)
    p = float(getattr(p, "p", p))
    if not 1.0 < p < math.inf:
        raise ValueError(f"rad norm needs p in (1, inf), got {p}")
    if p >= 2.0:
        val = max(_column_norm_fast(b, p), _row_norm_fast(b, p))
        return RadBracket(val, val, None, None, True, 0)
    pc = conjugate_exponent(p)
    scale = _column_norm_fast(b, p)
    if scale == 0.0:
        return RadBracket(0.0, 0.0, np.zeros_like(b), np.zeros_like(b), True, 0)

    # primal: minimize col(x - v) + row(v) with Nesterov + adaptive restart
    v = 0.5 * b
    y = v.copy()
    t = 1.0
    eps = 1e-2 * scale**2
    best_val = math.inf
    best_v = v.copy()
    f_prev = math.inf
    lower = 0.0
    iterations = 0
    chunk = 200
    done = False
    while iterations < max_iter and not done:
        for _ in range(chunk):
            iterations += 1
            cu, gu = column_norm_grad(b - y, p, eps)
            rv, gv = row_norm_grad(y, p, eps)
            g = gv - gu
            gn = float(np.linalg.norm(g))
            if gn == 0.0:
                break
            step = 0.5 * scale / (gn * math.sqrt(iterations))
            v_new = y - step * g
            t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
            y_new = v_new + ((t - 1.0) / t_new) * (v_new - v)
            f = _column_norm_fast(b - v_new, p) + _row_norm_fast(v_new, p)
            if f > f_prev:
                y_new, t_new = v_new, 1.0
            f_prev = f
            v, y, t = v_new, y_new, t_new
            if f < best_val:
                best_val, best_v = f, v_new.copy()
            if iterations % 500 == 0:
                eps = max(eps * 0.1, 1e-14)
        # dual certificates from the primal subgradients
        _, gcol = column_norm_grad(b - best_v, p, 1e-12)
        _, grow = row_norm_grad(best_v, p, 1e-12)
        for cand in (gcol, grow, 0.5 * (gcol + grow)):
            lower = max(lower, _dual_value(b, cand, pc))
        upper = min(best_val, _column_norm_fast(b, p), _row_norm_fast(b, p))
        if upper - lower <= tol * upper:
            done = True

    candidates = [
        (best_val, best_v),
        (_column_norm_fast(b, p), np.zeros_like(b)),
        (_row_norm_fast(b, p), b.copy()),
    ]
    upper, best_v = min(candidates, key=lambda pair: pair[0])

    if upper - lower > tol * upper:
        # fall back to sampled + ascended dual starts
        k, n, _ = b.shape
        for s in range(dual_starts):
            y0 = rngmod.random_block_vec(rngmod.substream(seed, s), k, n)
            lower = max(lower, _dual_ascent(b, y0, pc, dual_steps))
            if upper - lower <= tol * upper:
                break
        _, gcol = column_norm_grad(b - best_v, p, 1e-12)
        lower = max(lower, _dual_ascent(b, gcol, pc, dual_steps))

    lower = min(lower, upper)
    converged = (upper - lower) <= tol * max(upper, 1e-300)
    return RadBracket(lower, upper, b - best_v, best_v, converged, iterations)


def duality_check(x, y, p) -> bool:
    """|sum_k Tr(x_k y_k)| <= col_p(x) row_{p*}(y) + 1e-9."""
    bx = as_block_vec(x, "x")
    by = as_block_vec(y, "y")
    if bx.shape != by.shape:
        raise ValueError(f"shape mismatch: {bx.shape} vs {by.shape}")
    p = float(getattr(p, "p", p))
    if not 1.0 < p < math.inf:
        raise ValueError(f"duality check needs p in (1, inf), got {p}")
    lhs = abs(_pair(bx, by))
    rhs = column_norm(bx, p) * row_norm(by, conjugate_exponent(p))
    return lhs <= rhs + 1e-9


def regular_norm(c) -> float:
    """Operator norm of the entrywise absolute value matrix."""
    a = np.asarray(c)
    if a.ndim != 2:
        raise ValueError(f"regular norm needs a matrix, got ndim {a.ndim}")
    if not np.all(np.isfinite(np.abs(a))):
        raise ValueError("matrix contains non-finite entries")
    return float(np.linalg.norm(np.abs(a), 2))


def op_matrix_apply(c, t_table, x) -> np.ndarray:
    """Matrix of operators acting on a block vector: y_i = sum_j c_ij T_ij(x_j)."""
    b = as_block_vec(x)
    k = b.shape[0]
    c = np.asarray(c, dtype=complex)
    if c.shape != (k, k):
        raise ValueError(f"coefficient matrix must be {k}x{k}, got {c.shape}")
    rows = list(t_table)
    if len(rows) != k or any(len(list(r)) != k for r in rows):
        raise ValueError(f"operator table must be {k}x{k}")
    out = np.zeros_like(b)
    for i in range(k):
        for j in range(k):
            if c[i, j] == 0.0:
                continue
            out[i] += c[i, j] * rows[i][j].apply(b[j])
    return out
