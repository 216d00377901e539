"""Dense complex-matrix kernel: singular values, Schatten (quasi-)norms,
modulus, trace pairing, spectral radius and primary matrix functions.

All matrices are square ``numpy`` arrays promoted to ``complex128``.  Schatten
norms are computed from singular values; for ``p < 1`` the same formula is
used and yields a quasi-norm (no triangle inequality is claimed).  Matrix
functions go through a complex Schur form with eigenvalue clustering, a
contour evaluation on each cluster block and a block Parlett recurrence
across blocks, so confluent spectra are handled without derivative
information.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

DEFAULT_TOL = 1e-10

__all__ = [
    "Exponent",
    "conjugate_exponent",
    "as_square_matrix",
    "singular_values",
    "schatten_norm",
    "schatten_from_singular_values",
    "modulus",
    "trace_pairing",
    "spectral_radius",
    "primary_matrix_function",
    "MatrixFunctionInfo",
    "ClusterWarning",
]


class ClusterWarning(UserWarning):
    """Raised as a warning when eigenvalue clusters are merged confluently."""


@dataclasses.dataclass(frozen=True)
class Exponent:
    """A Schatten exponent p in (0, inf] with its conjugate."""

    p: float

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError(f"exponent must be positive, got {self.p}")

    @property
    def conjugate(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def is_quasi(self) -> bool:
        return self.p < 1.0

    def __float__(self) -> float:
        return float(self.p)


def conjugate_exponent(p: float) -> float:
    """Conjugate exponent p* with 1/p + 1/p* = 1 (p in [1, inf])."""
    p = float(p)
    if p < 1.0:
        raise ValueError(f"conjugate exponent undefined for p = {p} < 1")
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def _pval(p) -> float:
    return float(getattr(p, "p", p))


def as_square_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and promote input to a finite square complex matrix."""
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def singular_values(x) -> np.ndarray:
    """Nonincreasing singular values of a square complex matrix."""
    a = as_square_matrix(x)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise np.linalg.LinAlgError(f"SVD failed on {a.shape} matrix: {exc}") from exc


def schatten_from_singular_values(sv, p) -> float:
    """(sum sigma_i^p)^(1/p); max singular value for p = inf.

    Scaled by the top singular value to avoid overflow for large p.
    """
    p = _pval(p)
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    sv = np.asarray(sv, dtype=float)
    top = float(sv[0]) if sv.size else 0.0
    if math.isinf(p) or top == 0.0:
        return top
    return top * float(np.sum((sv / top) ** p)) ** (1.0 / p)


def schatten_norm(x, p) -> float:
    """Schatten p-(quasi-)norm of x; p = inf gives the operator norm."""
    return schatten_from_singular_values(singular_values(x), p)


def modulus(x) -> np.ndarray:
    """|x| = (x*x)^(1/2), the positive semidefinite polar factor."""
    a = as_square_matrix(x)
    u, s, vh = np.linalg.svd(a)
    m = vh.conj().T @ (s[:, None] * vh)
    return (m + m.conj().T) / 2.0


def trace_pairing(x, y) -> complex:
    """Bilinear duality pairing <x, y> = Tr(x y)."""
    a = as_square_matrix(x, "x")
    b = as_square_matrix(y, "y")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.einsum("ij,ji->", a, b))


def spectral_radius(x) -> float:
    """max |eigenvalue| of x."""
    a = as_square_matrix(x)
    return float(np.max(np.abs(np.linalg.eigvals(a)))) if a.size else 0.0


# ---------------------------------------------------------------------------
# primary matrix function: Schur form + cluster blocks + Parlett recurrence
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class MatrixFunctionInfo:
    cluster_sizes: list
    condition_warning: bool
    min_separation: float


def _swap_adjacent(r: np.ndarray, q: np.ndarray, i: int) -> None:
    # unitary similarity swapping diagonal entries i, i+1 of triangular r
    t11, t12, t22 = r[i, i], r[i, i + 1], r[i + 1, i + 1]
    if t11 == t22:
        return
    v = np.array([t12, t22 - t11], dtype=complex)
    v /= np.linalg.norm(v)
    g = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]], dtype=complex)
    r[i : i + 2, :] = g.conj().T @ r[i : i + 2, :]
    r[:, i : i + 2] = r[:, i : i + 2] @ g
    q[:, i : i + 2] = q[:, i : i + 2] @ g
    r[i + 1, i] = 0.0


def _cluster_labels(evals: np.ndarray, delta: float) -> np.ndarray:
    # transitive closure of |lam_i - lam_j| <= delta
    n = len(evals)
    labels = -np.ones(n, dtype=int)
    current = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = current
        while stack:
            j = stack.pop()
            near = np.nonzero((labels < 0) & (np.abs(evals - evals[j]) <= delta))[0]
            labels[near] = current
            stack.extend(near.tolist())
        current += 1
    return labels


def _reorder_clusters(r: np.ndarray, q: np.ndarray, labels: np.ndarray) -> list:
    # bubble adjacent swaps until equal labels are contiguous (stable order)
    first_seen: dict = {}
    for lab in labels:
        first_seen.setdefault(int(lab), len(first_seen))
    keys = [first_seen[int(lab)] for lab in labels]
    n = len(keys)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if keys[i] > keys[i + 1]:
                _swap_adjacent(r, q, i)
                keys[i], keys[i + 1] = keys[i + 1], keys[i]
                changed = True
    return keys


def _block_contour(rblk: np.ndarray, f: Callable, radius: float, nodes: int = 96) -> np.ndarray:
    # f(rblk) = (1/2*pi*i) oint f(z) (zI - rblk)^(-1) dz on a circle around
    # the cluster mean; trapezoid rule is spectrally accurate here
    m = rblk.shape[0]
    center = complex(np.mean(np.diag(rblk)))
    theta = (np.arange(nodes) + 0.5) * (2.0 * np.pi / nodes)
    eye = np.eye(m, dtype=complex)
    acc = np.zeros((m, m), dtype=complex)
    for th in theta:
        w = radius * np.exp(1j * th)
        acc += f(center + w) * sla.solve_triangular(
            (center + w) * eye - rblk, w * eye, lower=False
        )
    return acc / nodes


def primary_matrix_function(
    x,
    f: Callable[[complex], complex],
    singularity_distance: Optional[Callable[[complex], float]] = None,
    cluster_tol: float = 1e-6,
    with_info: bool = False,
):
    """Evaluate the primary matrix function f(x).

    ``f`` must be analytic on a neighbourhood of every eigenvalue of ``x``
    (the caller asserts this).  ``singularity_distance(z)``, when given,
    returns the distance from ``z`` to the nearest singularity or branch cut
    of ``f`` and is used both to reject spectra touching the cut and to size
    the per-cluster contours.

    Eigenvalues closer than ``cluster_tol`` (times the spectral scale) are
    grouped; each cluster block is evaluated by a Cauchy contour around the
    cluster and blocks are coupled through the Parlett recurrence (Sylvester
    solves).  Exact on polynomials up to roundoff.
    """
    a = as_square_matrix(x)
    n = a.shape[0]
    if n == 0:
        return a.copy()

    # fast path: exactly diagonal input
    if np.count_nonzero(a - np.diag(np.diag(a))) == 0:
        lam = np.diag(a)
        _check_singularities(lam, singularity_distance)
        out = np.diag(np.array([f(complex(z)) for z in lam], dtype=complex))
        return (out, MatrixFunctionInfo([1] * n, False, math.inf)) if with_info else out

    r, q = sla.schur(a, output="complex")
    lam = np.diag(r).copy()
    _check_singularities(lam, singularity_distance)
    scale = max(1.0, float(np.max(np.abs(lam))))
    delta = cluster_tol * scale
    labels = _cluster_labels(lam, delta)
    keys = _reorder_clusters(r, q, labels)

    bounds = [0] + [i for i in range(1, n) if keys[i] != keys[i - 1]] + [n]
    blocks = list(zip(bounds[:-1], bounds[1:]))
    nb = len(blocks)

    warn = False
    fmat = np.zeros_like(r)
    for lo, hi in blocks:
        if hi - lo == 1:
            fmat[lo, lo] = f(complex(r[lo, lo]))
            continue
        warn = True
        sub = r[lo:hi, lo:hi]
        mu = np.diag(sub)
        center = complex(np.mean(mu))
        spread = float(np.max(np.abs(mu - center)))
        if singularity_distance is None:
            radius = max(8.0 * spread, 1e-3)
        else:
            dist = float(singularity_distance(center))
            if spread >= 0.3 * dist:
                raise ValueError(
                    "eigenvalue cluster extends too close to a singularity of f "
                    f"(spread {spread:.3e}, distance {dist:.3e})"
                )
            radius = min(max(math.sqrt(max(spread, 1e-300) * dist), 2.0 * spread, 1e-6), 0.6 * dist)
        fmat[lo:hi, lo:hi] = _block_contour(sub, f, radius)

    min_sep = math.inf
    for bi in range(nb - 1):
        for bj in range(bi + 1, nb):
            li, hi_ = blocks[bi]
            lj, hj = blocks[bj]
            sep = np.min(np.abs(lam_pairs(r, li, hi_, lj, hj)))
            min_sep = min(min_sep, sep)
    if nb > 1 and min_sep < 10.0 * delta:
        warn = True

    for d in range(1, nb):
        for bi in range(nb - d):
            bj = bi + d
            i0, i1 = blocks[bi]
            j0, j1 = blocks[bj]
            rij = r[i0:i1, j0:j1]
            rhs = fmat[i0:i1, i0:i1] @ rij - rij @ fmat[j0:j1, j0:j1]
            for bk in range(bi + 1, bj):
                k0, k1 = blocks[bk]
                rhs += fmat[i0:i1, k0:k1] @ r[k0:k1, j0:j1]
                rhs -= r[i0:i1, k0:k1] @ fmat[k0:k1, j0:j1]
            fmat[i0:i1, j0:j1] = sla.solve_sylvester(
                r[i0:i1, i0:i1], -r[j0:j1, j0:j1], rhs
            )

    out = q @ fmat @ q.conj().T
    if warn:
        warnings.warn(
            "confluent or closely clustered eigenvalues; result may lose accuracy",
            ClusterWarning,
            stacklevel=2,
        )
    if with_info:
        sizes = [hi - lo for lo, hi in blocks]
        return out, MatrixFunctionInfo(sizes, warn, min_sep)
    return out


def lam_pairs(r: np.ndarray, li: int, hi: int, lj: int, hj: int) -> np.ndarray:
    a = np.diag(r)[li:hi]
    b = np.diag(r)[lj:hj]
    return (a[:, None] - b[None, :]).ravel()


def _check_singularities(lam: np.ndarray, singularity_distance) -> None:
    if singularity_distance is None:
        return
    for z in lam:
        if float(singularity_distance(complex(z))) <= 1e-14:
            raise ValueError(f"spectrum touches a singularity or branch cut of f at {z}")
