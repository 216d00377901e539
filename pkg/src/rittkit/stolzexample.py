"""The diagonal counterexample pipeline.

The diagonal operator ``a = diag(1 - 2^-k)`` generates left/right
multiplications whose column and row square functions separate: on the
rank-one test matrix with all entries ``1/sqrt(n)`` the column square
function stays comparable to ``sqrt(n)`` (closed form ``||(I+a)^(-1) x||``)
while the row square function equals ``||A||_{S^(p/2)}^(1/2)`` for the
explicit kernel ``A_ij = 2^(i+j) / (2^i + 2^j - 1)^2``, which grows much
slower.  The growth experiment tabulates both against n and fits the
log-log slope of their ratio.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import math
import os
from typing import List, Optional, Sequence

import numpy as np

from .matcore import schatten_norm, singular_values
from .superop import SuperOp

__all__ = [
    "DiagA",
    "make_diag_a",
    "rank_one_test",
    "matrix_A",
    "a_norm_bounds",
    "GrowthRow",
    "GrowthTable",
    "growth_experiment",
    "thread_budget",
]


@dataclasses.dataclass(frozen=True)
class DiagA:
    n: int
    entries: np.ndarray  # a_k = 1 - 2^-k, increasing in [1/2, 1)


def make_diag_a(n: int):
    """Diagonal symbol a and its multiplication operators (a, L_a, R_a)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    entries = 1.0 - 0.5 ** np.arange(1, n + 1)
    mat = np.diag(entries).astype(complex)
    return DiagA(n, entries), SuperOp.left_mult(mat), SuperOp.right_mult(mat)


def rank_one_test(n: int) -> np.ndarray:
    """x = (1/sqrt(n)) e (x) e, all entries 1/sqrt(n); ||x||_p = sqrt(n) for all p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full((n, n), 1.0 / math.sqrt(n), dtype=complex)


def matrix_A(n: int) -> np.ndarray:
    """A_ij = 2^(i+j) / (2^i + 2^j - 1)^2 = (1-a_i)(1-a_j)(1 - a_i a_j)^(-2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1, dtype=float)
    num = np.exp2(i[:, None] + i[None, :])
    den = (np.exp2(i)[:, None] + np.exp2(i)[None, :] - 1.0) ** 2
    return (num / den).astype(complex)


def a_norm_bounds(n: int):
    """(||A||_{S^1}, ||A||^2_{S^2}) for the n x n kernel A."""
    a = matrix_A(n)
    sv = singular_values(a)
    return float(np.sum(sv)), float(np.sum(np.abs(a) ** 2))


@dataclasses.dataclass
class GrowthRow:
    n: int
    col: float
    row: float
    ratio: float


@dataclasses.dataclass
class GrowthTable:
    p: float
    rows: List[GrowthRow]
    slope: float
    residual: float
    theta: float
    expected_slope: float
    ratio_numerator: str  # "col" for p > 2, "row" for p < 2


def _interpolation_theta(p: float) -> float:
    # exponent theta with 1/(q/2) = (1-theta) + theta/2 for q = max(p, p*),
    # capped at 1 once the S^2 bound takes over (q >= 4)
    q = p if p > 2.0 else p / (p - 1.0)
    return 1.0 if q >= 4.0 else 2.0 - 4.0 / q


def thread_budget() -> int:
    raw = os.environ.get("RITTKIT_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return max(1, min(8, os.cpu_count() or 1))


def _growth_row(p: float, n: int) -> GrowthRow:
    # closed forms from the diagonal structure; no truncated series involved
    diag, _, _ = make_diag_a(n)
    x = rank_one_test(n)
    inv = np.diag(1.0 / (1.0 + diag.entries)).astype(complex)
    col = schatten_norm(inv @ x, p)
    row = math.sqrt(schatten_norm(matrix_A(n), p / 2.0))
    ratio = col / row if p > 2.0 else row / col
    return GrowthRow(n, col, row, ratio)


def growth_experiment(p: float, n_list: Sequence[int], threads: Optional[int] = None) -> GrowthTable:
    """Column vs row square-function growth on the rank-one family."""
    p = float(p)
    if p <= 1.0 or p == 2.0:
        raise ValueError(f"growth experiment needs p in (1, inf) with p != 2, got {p}")
    ns = [int(n) for n in n_list]
    if not ns:
        raise ValueError("n_list must be nonempty")
    if any(n < 1 for n in ns):
        raise ValueError("all n must be >= 1")

    workers = threads if threads is not None else thread_budget()
    if workers > 1 and len(ns) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: _growth_row(p, n), ns))
    else:
        rows = [_growth_row(p, n) for n in ns]

    logs_n = np.log([r.n for r in rows])
    logs_r = np.log([r.ratio for r in rows])
    if len(rows) >= 2:
        slope, intercept = np.polyfit(logs_n, logs_r, 1)
        fit = slope * logs_n + intercept
        residual = float(np.sqrt(np.mean((logs_r - fit) ** 2)))
    else:
        slope, residual = 0.0, 0.0
    theta = _interpolation_theta(p)
    return GrowthTable(
        p=p,
        rows=rows,
        slope=float(slope),
        residual=residual,
        theta=theta,
        expected_slope=theta / 4.0,
        ratio_numerator="col" if p > 2.0 else "row",
    )
