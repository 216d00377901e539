"""Selfadjoint Markov maps on matrix algebras and their decomposition demo.

A Markov map is unital, completely positive and trace preserving; it is
selfadjoint when symmetric for the trace pairing.  Validation uses the
normalized trace convention (tau = Tr / n), which changes none of the
certificate checks; Schatten norms elsewhere keep the unnormalized trace and
differ by the constant n^(1/p), never mixed inside one inequality.

Markov maps always fix the identity, so 1 is an eigenvalue; the
decomposition demo compresses the map onto the orthogonal complement of its
full fixed-point subspace (for an ergodic map that complement is exactly the
trace-zero subspace) and runs the column/row decomposition there.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

import numpy as np

from . import rng as rngmod
from .decomp import DecompResult, decompose
from .matcore import as_square_matrix, schatten_norm
from .superop import SuperOp

__all__ = [
    "MarkovCertificate",
    "MarkovMap",
    "choi_matrix",
    "validate_markov",
    "schur_markov",
    "unitary_mixture_markov",
    "fixed_point_compression",
    "markov_decomposition_demo",
]

CHECK_TOL = 1e-10
MINUS_ONE_MARGIN = 1e-8


@dataclasses.dataclass(frozen=True)
class MarkovCertificate:
    unital: bool
    trace_preserving: bool
    cp: bool
    selfadjoint: bool
    minus_one_free: bool
    choi_min_eig: float
    distance_to_minus_one: float

    @property
    def valid(self) -> bool:
        return (
            self.unital
            and self.trace_preserving
            and self.cp
            and self.selfadjoint
            and self.minus_one_free
        )

    def failed_flags(self):
        names = ("unital", "trace_preserving", "cp", "selfadjoint", "minus_one_free")
        return [n for n in names if not getattr(self, n)]


@dataclasses.dataclass(frozen=True)
class MarkovMap:
    op: SuperOp
    certificate: MarkovCertificate


def choi_matrix(op: SuperOp) -> np.ndarray:
    """Block matrix [T(e_ij)]: sum_ij e_ij (x) T(e_ij), positivity <=> CP."""
    n = op.dim
    choi = np.zeros((n * n, n * n), dtype=complex)
    basis = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            basis[i, j] = 1.0
            choi[i * n : (i + 1) * n, j * n : (j + 1) * n] = op.apply(basis)
            basis[i, j] = 0.0
    return choi


def validate_markov(op: SuperOp) -> MarkovCertificate:
    """Check the Markov flags at tolerance 1e-10 each."""
    n = op.dim
    eye = np.eye(n, dtype=complex)
    unital = float(np.max(np.abs(op.apply(eye) - eye))) <= CHECK_TOL

    mat = op.as_matrix()
    # trace preservation: Tr(T(x)) = Tr(x) for all x <=> M^H vec(I) = vec(I)
    vec_eye = eye.ravel()
    trace_preserving = float(np.max(np.abs(mat.conj().T @ vec_eye - vec_eye))) <= CHECK_TOL

    choi = choi_matrix(op)
    choi_min = float(np.min(np.linalg.eigvalsh((choi + choi.conj().T) / 2.0)))
    cp = choi_min >= -CHECK_TOL

    adj = op.adjoint().as_matrix()
    scale = max(1.0, float(np.max(np.abs(mat))))
    selfadjoint = float(np.max(np.abs(adj - mat))) <= CHECK_TOL * scale

    spectrum = np.linalg.eigvals(mat)
    dist = float(np.min(np.abs(spectrum + 1.0)))
    minus_one_free = dist > MINUS_ONE_MARGIN

    return MarkovCertificate(
        unital=unital,
        trace_preserving=trace_preserving,
        cp=cp,
        selfadjoint=selfadjoint,
        minus_one_free=minus_one_free,
        choi_min_eig=choi_min,
        distance_to_minus_one=dist,
    )


def schur_markov(m) -> MarkovMap:
    """Markov map x -> m * x (entrywise) from a real symmetric PSD matrix
    with unit diagonal."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"m must be square, got shape {a.shape}")
    if np.iscomplexobj(a) and float(np.max(np.abs(a.imag))) > CHECK_TOL:
        raise ValueError("m must be real")
    a = a.real.astype(float)
    if float(np.max(np.abs(a - a.T))) > CHECK_TOL:
        raise ValueError("m must be symmetric")
    if float(np.max(np.abs(np.diag(a) - 1.0))) > CHECK_TOL:
        raise ValueError("m must have unit diagonal")
    if float(np.min(np.linalg.eigvalsh(a))) < -CHECK_TOL:
        raise ValueError("m must be positive semidefinite")
    op = SuperOp.schur(a)
    return MarkovMap(op, validate_markov(op))


def unitary_mixture_markov(weights, unitaries) -> MarkovMap:
    """Markov map x -> sum_i w_i u_i x u_i^*; the unitary family must be
    closed under adjoints with matching weights (forcing selfadjointness)."""
    ws = np.asarray(weights, dtype=float)
    us = [as_square_matrix(u, "unitary") for u in unitaries]
    if ws.ndim != 1 or ws.size != len(us) or ws.size == 0:
        raise ValueError("weights and unitaries must be matching nonempty sequences")
    if np.any(ws <= 0) or abs(float(np.sum(ws)) - 1.0) > CHECK_TOL:
        raise ValueError("weights must be positive and sum to 1")
    unmatched = list(range(len(us)))
    while unmatched:
        i = unmatched[0]
        target = us[i].conj().T
        match = None
        for j in unmatched:
            if np.max(np.abs(us[j] - target)) <= 1e-9 and abs(ws[j] - ws[i]) <= 1e-12:
                match = j
                break
        if match is None:
            raise ValueError("unitary family is not closed under adjoints with matching weights")
        unmatched.remove(i)
        if match != i:
            unmatched.remove(match)
    op = SuperOp.unitary_mixture(ws, us)
    return MarkovMap(op, validate_markov(op))


def fixed_point_compression(op: SuperOp, fixed_tol: float = 1e-8):
    """Compress a selfadjoint map onto the complement of its fixed subspace.

    Returns (T P, P) where P is the orthogonal projection (trace inner
    product) onto the complement of ker(I - T).  On that subspace the
    compression agrees with T and its spectrum drops the eigenvalue 1.
    """
    mat = op.as_matrix()
    herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
    if herm_defect > 1e-8 * max(1.0, float(np.max(np.abs(mat)))):
        raise ValueError("fixed-point compression needs a selfadjoint map")
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    fixed = np.abs(w - 1.0) <= fixed_tol
    vf = v[:, fixed]
    proj = np.eye(mat.shape[0], dtype=complex) - vf @ vf.conj().T
    return SuperOp.explicit(mat @ proj, op.dim), SuperOp.explicit(proj, op.dim)


def markov_decomposition_demo(
    markov: MarkovMap,
    p: float,
    x: Optional[np.ndarray] = None,
    seed: int = 0,
    tol: float = 1e-6,
    splitter: str = "rad-optimal",
) -> DecompResult:
    """Column/row decomposition of a Markov map on its non-fixed subspace."""
    if not 1.0 < p < 2.0:
        raise ValueError(f"demo needs p in (1, 2), got {p}")
    cert = markov.certificate
    if not cert.valid:
        raise ValueError(f"Markov certificate failed: {', '.join(cert.failed_flags())}")
    compressed, proj = fixed_point_compression(markov.op)
    n = markov.op.dim
    if x is None:
        x = rngmod.random_matrix(rngmod.substream(seed, 0), n)
    xm = as_square_matrix(x, "x")
    xv = proj.apply(xm)
    if schatten_norm(xv, 2.0) <= 1e-12 * max(schatten_norm(xm, 2.0), 1e-300):
        raise ValueError(
            "input lies in the fixed subspace of the map; the decomposition "
            "is only defined on the range of I - T (degenerate for the identity map)"
        )
    rho_hat = compressed.spectral_radius()
    if rho_hat >= 1.0 - 1e-12:
        raise ValueError(
            f"compressed spectral radius {rho_hat} is not < 1; "
            "no certified truncation is possible"
        )
    return decompose(compressed, xv, p, splitter=splitter, tol=tol)
