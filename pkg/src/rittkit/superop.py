"""Linear operators on n-by-n matrices (superoperators).

A :class:`SuperOp` is one of: left multiplication ``x -> a x``, right
multiplication ``x -> x a``, a Schur (entrywise) multiplier ``x -> m * x``,
a weighted mixture of unitary conjugations ``x -> sum w_i u_i x u_i^*``, or
an explicit ``n^2 x n^2`` matrix acting on row-major vectorizations.

Algebra (compose, add, scale, power, resolvent, analytic functions) stays in
the structured representation whenever it is closed there, which keeps the
spectral and norm computations for multiplication operators exact; anything
else falls back to the explicit matrix.

Adjoints are taken with respect to the bilinear trace pairing
``<x, y> = Tr(x y)`` (Schatten duality), so the adjoint of a left
multiplication is the right multiplication by the same symbol.
"""

from __future__ import annotations

import dataclasses
import math
import numbers
from typing import Callable, Iterable, Optional

import numpy as np

from . import rng as rngmod
from .matcore import (
    as_square_matrix,
    primary_matrix_function,
    schatten_norm,
)

__all__ = ["SuperOp", "NormBracket", "SpectrumHit"]


class SpectrumHit(ValueError):
    """Resolvent requested at (numerically) a spectral point."""


@dataclasses.dataclass(frozen=True)
class NormBracket:
    """Certified bracket lower <= ||T||_{p->p} <= upper."""

    lower: float
    upper: float
    exact: bool = False

    @property
    def value(self) -> float:
        return self.upper

    def scaled(self, c: float) -> "NormBracket":
        return NormBracket(self.lower * c, self.upper * c, self.exact)

    @staticmethod
    def elementwise_max(brackets: Iterable["NormBracket"]) -> "NormBracket":
        items = list(brackets)
        if not items:
            raise ValueError("empty bracket collection")
        return NormBracket(
            max(b.lower for b in items),
            max(b.upper for b in items),
            all(b.exact for b in items),
        )


def _transpose_perm(n: int) -> np.ndarray:
    return np.arange(n * n).reshape(n, n).T.ravel()


class SuperOp:
    """A linear map on n-by-n complex matrices."""

    def __init__(self, kind: str, dim: int, payload):
        self.kind = kind
        self.dim = int(dim)
        self._payload = payload
        self._eigenvalues = None  # lazy cache; payloads are never mutated

    # -- constructors -------------------------------------------------------

    @classmethod
    def left_mult(cls, a) -> "SuperOp":
        a = as_square_matrix(a, "a")
        return cls("left", a.shape[0], a)

    @classmethod
    def right_mult(cls, a) -> "SuperOp":
        a = as_square_matrix(a, "a")
        return cls("right", a.shape[0], a)

    @classmethod
    def schur(cls, m) -> "SuperOp":
        m = as_square_matrix(m, "m")
        return cls("schur", m.shape[0], m)

    @classmethod
    def unitary_mixture(cls, weights, unitaries) -> "SuperOp":
        ws = np.asarray(weights, dtype=float)
        us = [as_square_matrix(u, "unitary") for u in unitaries]
        if ws.ndim != 1 or len(us) != ws.size or ws.size == 0:
            raise ValueError("weights and unitaries must be matching nonempty sequences")
        if np.any(ws < 0):
            raise ValueError("weights must be nonnegative")
        n = us[0].shape[0]
        eye = np.eye(n)
        for u in us:
            if u.shape[0] != n:
                raise ValueError("unitaries must share one dimension")
            if np.max(np.abs(u.conj().T @ u - eye)) > 1e-10:
                raise ValueError("matrix is not unitary")
        return cls("mixture", n, (ws, us))

    @classmethod
    def explicit(cls, mat, dim: Optional[int] = None) -> "SuperOp":
        mat = np.asarray(mat, dtype=complex)
        n = int(round(math.sqrt(mat.shape[0]))) if dim is None else int(dim)
        if mat.shape != (n * n, n * n):
            raise ValueError(f"explicit matrix must be {n*n}x{n*n}, got {mat.shape}")
        return cls("explicit", n, mat)

    @classmethod
    def identity(cls, n: int) -> "SuperOp":
        return cls.left_mult(np.eye(n))

    def _one(self) -> "SuperOp":
        # identity in the same structured class, so sums stay structured
        n = self.dim
        if self.kind == "left":
            return SuperOp.left_mult(np.eye(n))
        if self.kind == "right":
            return SuperOp.right_mult(np.eye(n))
        if self.kind == "schur":
            return SuperOp.schur(np.ones((n, n)))
        return SuperOp.explicit(np.eye(n * n), n)

    # -- action -------------------------------------------------------------

    def apply(self, x) -> np.ndarray:
        x = as_square_matrix(x, "x")
        if x.shape[0] != self.dim:
            raise ValueError(f"operator dim {self.dim} vs input dim {x.shape[0]}")
        if self.kind == "left":
            return self._payload @ x
        if self.kind == "right":
            return x @ self._payload
        if self.kind == "schur":
            return self._payload * x
        if self.kind == "mixture":
            ws, us = self._payload
            acc = np.zeros_like(x)
            for w, u in zip(ws, us):
                acc += w * (u @ x @ u.conj().T)
            return acc
        return (self._payload @ x.ravel()).reshape(self.dim, self.dim)

    def apply_blocks(self, blocks: np.ndarray) -> np.ndarray:
        """Apply to a stack of matrices, shape (k, n, n)."""
        if self.kind == "left":
            return np.einsum("ij,kjl->kil", self._payload, blocks)
        if self.kind == "right":
            return np.einsum("kij,jl->kil", blocks, self._payload)
        if self.kind == "schur":
            return self._payload[None, :, :] * blocks
        return np.stack([self.apply(b) for b in blocks])

    def as_matrix(self) -> np.ndarray:
        n = self.dim
        if self.kind == "left":
            return np.kron(self._payload, np.eye(n))
        if self.kind == "right":
            return np.kron(np.eye(n), self._payload.T)
        if self.kind == "schur":
            return np.diag(self._payload.ravel()).astype(complex)
        if self.kind == "mixture":
            ws, us = self._payload
            acc = np.zeros((n * n, n * n), dtype=complex)
            for w, u in zip(ws, us):
                acc += w * np.kron(u, u.conj())
            return acc
        return self._payload

    def adjoint(self) -> "SuperOp":
        """Trace-duality adjoint: Tr(T(x) y) = Tr(x T'(y))."""
        if self.kind == "left":
            return SuperOp.right_mult(self._payload)
        if self.kind == "right":
            return SuperOp.left_mult(self._payload)
        if self.kind == "schur":
            return SuperOp.schur(self._payload.T)
        if self.kind == "mixture":
            ws, us = self._payload
            return SuperOp("mixture", self.dim, (ws.copy(), [u.conj().T for u in us]))
        perm = _transpose_perm(self.dim)
        mat = self._payload.T[np.ix_(perm, perm)]
        return SuperOp.explicit(mat, self.dim)

    # -- algebra ------------------------------------------------------------

    def compose(self, other: "SuperOp") -> "SuperOp":
        """self after other."""
        self._check_dim(other)
        if self.kind == other.kind:
            if self.kind == "left":
                return SuperOp.left_mult(self._payload @ other._payload)
            if self.kind == "right":
                return SuperOp.right_mult(other._payload @ self._payload)
            if self.kind == "schur":
                return SuperOp.schur(self._payload * other._payload)
        return SuperOp.explicit(self.as_matrix() @ other.as_matrix(), self.dim)

    def __matmul__(self, other: "SuperOp") -> "SuperOp":
        return self.compose(other)

    def __add__(self, other: "SuperOp") -> "SuperOp":
        self._check_dim(other)
        if self.kind == other.kind and self.kind in ("left", "right", "schur"):
            return SuperOp(self.kind, self.dim, self._payload + other._payload)
        if self.kind == "mixture" and other.kind == "mixture":
            ws1, us1 = self._payload
            ws2, us2 = other._payload
            return SuperOp("mixture", self.dim, (np.concatenate([ws1, ws2]), us1 + us2))
        return SuperOp.explicit(self.as_matrix() + other.as_matrix(), self.dim)

    def __sub__(self, other: "SuperOp") -> "SuperOp":
        return self + (other * (-1.0))

    def __mul__(self, c) -> "SuperOp":
        if not isinstance(c, numbers.Number):
            return NotImplemented
        if self.kind in ("left", "right", "schur"):
            return SuperOp(self.kind, self.dim, c * self._payload)
        if self.kind == "mixture" and isinstance(c, numbers.Real) and c >= 0:
            ws, us = self._payload
            return SuperOp("mixture", self.dim, (float(c) * ws, list(us)))
        return SuperOp.explicit(c * self.as_matrix(), self.dim)

    __rmul__ = __mul__

    def power(self, k: int) -> "SuperOp":
        if k < 0:
            raise ValueError("negative powers not supported; use resolvent")
        if k == 0:
            return self._one()
        if self.kind in ("left", "right"):
            return SuperOp(self.kind, self.dim, np.linalg.matrix_power(self._payload, k))
        if self.kind == "schur":
            return SuperOp.schur(self._payload**k)
        return SuperOp.explicit(np.linalg.matrix_power(self.as_matrix(), k), self.dim)

    def resolvent(self, lam: complex) -> "SuperOp":
        """(lam I - T)^(-1); raises :class:`SpectrumHit` at spectral points."""
        lam = complex(lam)
        gap = np.min(np.abs(lam - self.eigenvalues()))
        scale = max(1.0, float(np.max(np.abs(self.eigenvalues()))))
        if gap <= 1e-12 * scale:
            raise SpectrumHit(f"lambda = {lam} is within {gap:.2e} of the spectrum")
        n = self.dim
        if self.kind in ("left", "right"):
            inv = np.linalg.inv(lam * np.eye(n) - self._payload)
            return SuperOp(self.kind, n, inv)
        if self.kind == "schur":
            return SuperOp.schur(1.0 / (lam - self._payload))
        return SuperOp.explicit(np.linalg.inv(lam * np.eye(n * n) - self.as_matrix()), n)

    def matfun(
        self,
        f: Callable[[complex], complex],
        singularity_distance: Optional[Callable[[complex], float]] = None,
    ) -> "SuperOp":
        """Primary function f(T), structured when the class is closed under it."""
        if self.kind in ("left", "right"):
            sym = primary_matrix_function(self._payload, f, singularity_distance)
            return SuperOp(self.kind, self.dim, sym)
        if self.kind == "schur":
            vals = np.array(
                [f(complex(z)) for z in self._payload.ravel()], dtype=complex
            ).reshape(self._payload.shape)
            return SuperOp.schur(vals)
        mat = primary_matrix_function(self.as_matrix(), f, singularity_distance)
        return SuperOp.explicit(mat, self.dim)

    # -- spectral data ------------------------------------------------------

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of T as an operator on matrices (without multiplicities
        for multiplication operators, where sigma(T) = sigma(symbol))."""
        if self._eigenvalues is None:
            if self.kind in ("left", "right"):
                self._eigenvalues = np.linalg.eigvals(self._payload)
            elif self.kind == "schur":
                self._eigenvalues = self._payload.ravel().astype(complex)
            else:
                self._eigenvalues = np.linalg.eigvals(self.as_matrix())
        return self._eigenvalues

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues())))

    # -- operator norms -----------------------------------------------------

    def norm2(self) -> float:
        """Exact S^2 -> S^2 operator norm."""
        if self.kind in ("left", "right"):
            return float(np.linalg.svd(self._payload, compute_uv=False)[0])
        if self.kind == "schur":
            return float(np.max(np.abs(self._payload)))
        return float(np.linalg.svd(self.as_matrix(), compute_uv=False)[0])

    def kraus_upper(self) -> float:
        """sum_s ||A_s|| ||B_s|| over an operator-sum form T(x) = sum A_s x B_s.

        By Hoelder this bounds ||T||_{S^p -> S^p} for every p in [1, inf].
        """
        if self.kind in ("left", "right"):
            return float(np.linalg.svd(self._payload, compute_uv=False)[0])
        if self.kind == "mixture":
            ws, _ = self._payload
            return float(np.sum(ws))
        n = self.dim
        mat = self.as_matrix().reshape(n, n, n, n)
        resh = mat.transpose(0, 2, 3, 1).reshape(n * n, n * n)
        u, s, vh = np.linalg.svd(resh)
        total = 0.0
        for k in range(len(s)):
            if s[k] <= 1e-14 * s[0]:
                break
            a = u[:, k].reshape(n, n)
            b = vh[k, :].conj().reshape(n, n).T
            total += (
                s[k]
                * np.linalg.svd(a, compute_uv=False)[0]
                * np.linalg.svd(b, compute_uv=False)[0]
            )
        return float(total)

    def sampled_lower(self, p: float, trials: int = 24, seed: int = 7) -> float:
        """Sampled lower bound for ||T||_{S^p -> S^p}."""
        n = self.dim
        best = 0.0
        candidates = [np.eye(n, dtype=complex)]
        mat = self.as_matrix()
        top = np.linalg.svd(mat)[2][0].conj().reshape(n, n)
        candidates.append(top)
        for t in range(trials):
            candidates.append(rngmod.random_matrix(rngmod.substream(seed, t), n))
        for x in candidates:
            nx = schatten_norm(x, p)
            if nx == 0.0:
                continue
            best = max(best, schatten_norm(self.apply(x), p) / nx)
        return best

    def op_norm_bracket(self, p: float, trials: int = 24, seed: int = 7) -> NormBracket:
        """Bracket for the S^p -> S^p operator norm.

        Exact for multiplication operators (any p) and at p = 2 in general;
        otherwise a sampled lower bound plus the Riesz-Thorin interpolation
        upper bound through the p = 1, 2, inf upper bounds.
        """
        p = float(p)
        if not p >= 1:
            raise ValueError(f"operator norms need p >= 1, got {p}")
        if self.kind in ("left", "right"):
            s = float(np.linalg.svd(self._payload, compute_uv=False)[0])
            return NormBracket(s, s, exact=True)
        n2 = self.norm2()
        if p == 2.0:
            return NormBracket(n2, n2, exact=True)
        u = self.kraus_upper()
        if math.isinf(p) or p == 1.0:
            upper = u
        elif p > 2.0:
            theta = 2.0 / p  # 1/p = theta/2 + (1-theta)/inf
            upper = (n2**theta) * (u ** (1.0 - theta))
        else:
            theta = 2.0 * (p - 1.0) / p  # 1/p = (1-theta)/1 + theta/2
            upper = (u ** (1.0 - theta)) * (n2**theta)
        upper = min(upper, u)
        lower = self.sampled_lower(p, trials=trials, seed=seed)
        if self.kind == "schur":
            lower = max(lower, float(np.max(np.abs(self._payload))))
        lower = min(lower, upper)
        return NormBracket(lower, upper, exact=False)

    # -- misc ---------------------------------------------------------------

    def _check_dim(self, other: "SuperOp") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SuperOp(kind={self.kind!r}, dim={self.dim})"
