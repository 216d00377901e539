"""Discrete square functions with certified truncation.

The square function of T at x is built from the blocks

    x_k = k^(alpha - 1/2) (rho T)^(k-1) (I - rho T)^alpha x,   k = 1, 2, ...

and measured in the column, row, rad, or split (infimum over x = x1 + x2 of
column + row) sense.  Truncation requires a strict contraction: the series
is cut at K once the certified tail bound drops below the tolerance times
the partial value, where the tail of the block norms is dominated by
``C sum_{k>K} k^(alpha-1/2) rhohat^(k-1)`` with ``rhohat`` the spectral
radius of ``rho T`` and ``C = ||(I - rho T)^alpha|| ||x||``.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from . import rng as rngmod
from .blocknorm import (
    RadBracket,
    column_norm,
    column_norm_grad,
    rad_norm_bracket,
    row_norm,
    row_norm_grad,
)
from .matcore import as_square_matrix, schatten_norm
from .ritt import fractional_power
from .superop import SuperOp

__all__ = [
    "SqSpec",
    "SqResult",
    "weighted_geometric_tail",
    "sq_sequence",
    "square_function",
    "alpha_equivalence_experiment",
    "AlphaEquivalenceTable",
]


@dataclasses.dataclass(frozen=True)
class SqSpec:
    """Square function request: exponent, weight power, flavour, truncation."""

    p: float
    alpha: float = 1.0
    kind: str = "col"
    k_max: int = 10**6
    tol: float = 1e-6
    rho: float = 1.0

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("p must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.kind not in ("col", "row", "rad", "split"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.k_max < 1 or not self.tol > 0:
            raise ValueError("k_max >= 1 and tol > 0 required")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")


@dataclasses.dataclass
class SqResult:
    value: float
    lower: float
    upper: float
    k_used: int
    tail_bound: float
    converged: bool
    rad: Optional[RadBracket] = None


def weighted_geometric_tail(s: float, q: float, k: int) -> float:
    """Rigorous upper bound for sum_{j > k} j^s q^(j-1), 0 <= q < 1."""
    if q <= 0.0:
        return 0.0
    if not q < 1.0:
        raise ValueError(f"need q < 1 for a convergent tail, got {q}")
    total = 0.0
    j0 = k + 1
    chunk = 4096
    while True:
        js = np.arange(j0, j0 + chunk, dtype=float)
        total += float(np.sum(np.exp(s * np.log(js) + (js - 1.0) * math.log(q))))
        j0 += chunk
        eta = ((j0 + 1.0) / j0) ** max(s, 0.0) * q
        if eta < 1.0:
            rem = math.exp(s * math.log(j0) + (j0 - 1.0) * math.log(q)) / (1.0 - eta)
            if rem <= 1e-12 * total + 1e-300:
                return total + rem
        if j0 > k + 100_000_000:  # pragma: no cover - defensive cap
            raise RuntimeError("tail summation did not stabilize")


def _damped(t: SuperOp, rho: float) -> SuperOp:
    return t if rho == 1.0 else t * float(rho)


def _sequence_blocks(t_rho: SuperOp, frac_x: np.ndarray, alpha: float, k: int) -> np.ndarray:
    n = frac_x.shape[0]
    blocks = np.empty((k, n, n), dtype=complex)
    cur = frac_x
    for i in range(k):
        blocks[i] = (i + 1.0) ** (alpha - 0.5) * cur
        if i + 1 < k:
            cur = t_rho.apply(cur)
    return blocks


def _certified_sequence(t: SuperOp, x: np.ndarray, spec: SqSpec):
    """Blocks plus (k_used, tail_bound, converged) under the tail policy."""
    if spec.p < 1.0:
        raise ValueError("certified truncation needs p >= 1 (norm triangle inequality)")
    t_rho = _damped(t, spec.rho)
    rho_hat = t_rho.spectral_radius()
    if rho_hat >= 1.0 - 1e-14:
        raise ValueError(
            "spectral radius of rho*T is >= 1: no certified tail; "
            "supply rho < 1 or a closed form"
        )
    frac = fractional_power(t_rho, spec.alpha)
    y = frac.apply(x)
    c = frac.op_norm_bracket(max(spec.p, 1.0)).upper * schatten_norm(x, max(spec.p, 1.0))
    s = spec.alpha - 0.5

    k = 16
    blocks = _sequence_blocks(t_rho, y, spec.alpha, min(k, spec.k_max))
    while True:
        k_used = blocks.shape[0]
        tail = c * weighted_geometric_tail(s, rho_hat, k_used)
        scale = min(column_norm(blocks, spec.p), row_norm(blocks, spec.p))
        if tail <= spec.tol * max(scale, 1e-300):
            return blocks, k_used, tail, True
        if k_used >= spec.k_max:
            return blocks, k_used, tail, False
        new_k = min(2 * k_used, spec.k_max)
        ext = np.empty((new_k, x.shape[0], x.shape[0]), dtype=complex)
        ext[:k_used] = blocks
        cur = t_rho.apply(blocks[k_used - 1] / (k_used**s))
        for i in range(k_used, new_k):
            ext[i] = (i + 1.0) ** s * cur
            if i + 1 < new_k:
                cur = t_rho.apply(cur)
        blocks = ext


def sq_sequence(t: SuperOp, x, spec: SqSpec) -> np.ndarray:
    """The truncated block sequence k^(alpha-1/2) (rho T)^(k-1) (I-rho T)^alpha x."""
    xm = as_square_matrix(x, "x")
    blocks, _, _, _ = _certified_sequence(t, xm, spec)
    return blocks


def _split_refine(t, x, spec, x1, k, steps=50):
    """Local convex refinement of the split x = x1 + (x - x1)."""
    t_rho = _damped(t, spec.rho)
    frac = fractional_power(t_rho, spec.alpha)
    s = spec.alpha - 0.5

    def sq_blocks(y):
        return _sequence_blocks(t_rho, frac.apply(y), spec.alpha, k)

    def pullback(grads):
        # adjoint (Hilbert-Schmidt) of y -> blocks, applied to block gradients
        acc = (k**s) * grads[k - 1]
        for i in range(k - 2, -1, -1):
            acc = _hs_adjoint_apply(t_rho, acc) + (i + 1.0) ** s * grads[i]
        return _hs_adjoint_apply(frac, acc)

    def value_grad(y1):
        v1, g1 = column_norm_grad(sq_blocks(y1), spec.p, 1e-12)
        v2, g2 = row_norm_grad(sq_blocks(x - y1), spec.p, 1e-12)
        return v1 + v2, pullback(g1) - pullback(g2)

    best = x1.copy()
    best_val, _ = value_grad(best)
    y = best.copy()
    v = best.copy()
    tau = 1.0
    scale = schatten_norm(x, spec.p)
    for it in range(steps):
        _, g = value_grad(y)
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        step = 0.25 * scale / (gn * math.sqrt(it + 1.0))
        v_new = y - step * g
        tau_new = (1.0 + math.sqrt(1.0 + 4.0 * tau * tau)) / 2.0
        y = v_new + ((tau - 1.0) / tau_new) * (v_new - v)
        v, tau = v_new, tau_new
        val_new, _ = value_grad(v_new)
        if val_new < best_val:
            best_val, best = val_new, v_new.copy()
    return best_val, best


def _hs_adjoint_apply(t: SuperOp, w: np.ndarray) -> np.ndarray:
    # Hilbert-Schmidt adjoint from the trace-duality adjoint: T^#(w) = T'(w^H)^H
    return t.adjoint().apply(w.conj().T).conj().T


def _rad_bracket_capped(blocks: np.ndarray, p: float, cap: int = 256) -> RadBracket:
    """Rad bracket of a long block sequence via its head.

    Zeroing tail blocks shrinks the column and row norms, so a lower bound
    for the head is a lower bound for the full sequence; for the upper bound
    the tail blocks are appended to the column side of the head witness.
    """
    k = blocks.shape[0]
    if k <= cap:
        return rad_norm_bracket(blocks, p)
    head = blocks[:cap]
    rb = rad_norm_bracket(head, p, max_iter=2000, dual_starts=16)
    u_full = np.concatenate([rb.witness_u, blocks[cap:]], axis=0)
    v_full = np.concatenate([rb.witness_v, np.zeros_like(blocks[cap:])], axis=0)
    upper = min(
        column_norm(u_full, p) + row_norm(v_full, p),
        column_norm(blocks, p),
        row_norm(blocks, p),
    )
    return RadBracket(min(rb.lower, upper), upper, u_full, v_full, rb.converged, rb.iterations)


def square_function(t: SuperOp, x, spec: SqSpec) -> SqResult:
    """Evaluate the requested square function with a certified truncation."""
    xm = as_square_matrix(x, "x")
    blocks, k_used, tail, converged = _certified_sequence(t, xm, spec)

    def settle(value: float) -> bool:
        # the convergence claim is always relative to the reported value
        return converged and tail <= spec.tol * max(value, 1e-300)

    if spec.kind == "col":
        v = column_norm(blocks, spec.p)
        return SqResult(v, max(v - tail, 0.0), v + tail, k_used, tail, settle(v))
    if spec.kind == "row":
        v = row_norm(blocks, spec.p)
        return SqResult(v, max(v - tail, 0.0), v + tail, k_used, tail, settle(v))
    if spec.kind == "rad":
        if spec.p >= 2.0:
            v = max(column_norm(blocks, spec.p), row_norm(blocks, spec.p))
            return SqResult(v, max(v - tail, 0.0), v + tail, k_used, tail, settle(v))
        rb = _rad_bracket_capped(blocks, spec.p)
        return SqResult(
            rb.upper,
            max(rb.lower - tail, 0.0),
            rb.upper + tail,
            k_used,
            tail,
            settle(rb.upper) and rb.converged,
            rad=rb,
        )

    # split: infimum over x = x1 + x2 of col-sq(x1) + row-sq(x2)
    from . import decomp as decomp_mod  # local import, decomp builds on sqfun

    t_rho = _damped(t, spec.rho)
    result = decomp_mod.decompose(t_rho, xm, spec.p, splitter="rad-optimal", tol=spec.tol)
    _, x1_ref = _split_refine(t, xm, spec, result.x1, min(k_used, 256), steps=50)

    def split_upper(x1: np.ndarray) -> float:
        cspec = dataclasses.replace(spec, kind="col")
        rspec = dataclasses.replace(spec, kind="row")
        return (
            square_function(t, x1, cspec).upper
            + square_function(t, xm - x1, rspec).upper
        )

    candidates = [result.x1, x1_ref, xm, np.zeros_like(xm)]
    upper = min(split_upper(x1) for x1 in candidates)
    if spec.p >= 2.0:
        rad_lower = max(column_norm(blocks, spec.p), row_norm(blocks, spec.p)) - tail
        rb = None
    else:
        rb = _rad_bracket_capped(blocks, spec.p)
        rad_lower = rb.lower - tail
    lower = max(rad_lower, 0.0)
    return SqResult(upper, lower, upper, k_used, tail, settle(upper), rad=rb)


@dataclasses.dataclass
class AlphaEquivalenceTable:
    alphas: Sequence[float]
    values: np.ndarray  # (samples, alphas)
    ratio_matrix: np.ndarray  # max over samples of value(alpha_a)/value(alpha_b)
    max_spread: float


def alpha_equivalence_experiment(
    t: SuperOp,
    p: float,
    alphas: Sequence[float],
    kind: str = "col",
    samples: int = 10,
    seed: int = 0,
    rho: float = 1.0,
    tol: float = 1e-6,
) -> AlphaEquivalenceTable:
    """Ratios of square functions across weight powers on random unit inputs."""
    alphas = list(alphas)
    n = t.dim
    values = np.zeros((samples, len(alphas)))
    for i in range(samples):
        x = rngmod.random_matrix(rngmod.substream(seed, i), n)
        x /= schatten_norm(x, p)
        for j, alpha in enumerate(alphas):
            spec = SqSpec(p=p, alpha=alpha, kind=kind, rho=rho, tol=tol)
            values[i, j] = square_function(t, x, spec).value
    ratio = np.zeros((len(alphas), len(alphas)))
    for a in range(len(alphas)):
        for b in range(len(alphas)):
            ratio[a, b] = float(np.max(values[:, a] / values[:, b]))
    return AlphaEquivalenceTable(alphas, values, ratio, float(np.max(ratio)))
