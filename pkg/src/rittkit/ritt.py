"""Ritt diagnostics, Stolz-domain geometry and functional-calculus bounds.

The Stolz domain ``B_gamma`` is the interior of the convex hull of the point
1 and the disc of radius ``sin(gamma)`` centred at 0.  Ritt constants are the
suprema of ``||T^n||`` and ``n ||T^n - T^(n-1)||`` together with a scan of
``|lambda - 1| ||R(lambda, T)||`` outside the unit disc; operator norms away
from p = 2 are carried as brackets (sampled lower bound, interpolation upper
bound).  Functional-calculus constants are bracketed the same way: a Cauchy
contour majorant from above and sampled polynomials from below.
"""

from __future__ import annotations

import dataclasses
import math
from typing import List, Optional, Sequence

import numpy as np

from . import rng as rngmod
from .blocknorm import as_block_vec, column_norm, row_norm
from .matcore import schatten_norm
from .superop import NormBracket, SpectrumHit, SuperOp

__all__ = [
    "StolzDomain",
    "stolz_membership",
    "min_stolz_angle",
    "RittReport",
    "ritt_constants",
    "col_bound_sample",
    "row_bound_sample",
    "fractional_power",
    "poly_eval",
    "poly_apply",
    "fc_upper_bound",
    "fc_lower_bound",
    "cb_lower_bound",
]


# ---------------------------------------------------------------------------
# Stolz domain geometry
# ---------------------------------------------------------------------------


def _cross(a: complex, b: complex) -> float:
    return float(np.imag(np.conj(a) * b))


@dataclasses.dataclass(frozen=True)
class StolzDomain:
    """B_gamma: interior of the convex hull of {1} and D(0, sin gamma)."""

    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < math.pi / 2:
            raise ValueError(f"gamma must lie in (0, pi/2), got {self.gamma}")

    @property
    def radius(self) -> float:
        return math.sin(self.gamma)

    def tangent_points(self) -> tuple:
        # tangency of the lines through 1 with the circle |z| = sin(gamma)
        phi = math.pi / 2 - self.gamma
        t = self.radius * np.exp(1j * phi)
        return complex(t), complex(np.conj(t))

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if abs(z) < self.radius:
            return True
        tp, tm = self.tangent_points()
        verts = (1.0 + 0.0j, tp, tm)
        signs = []
        for k in range(3):
            a, b = verts[k], verts[(k + 1) % 3]
            signs.append(_cross(b - a, z - a))
        return all(s > 0 for s in signs) or all(s < 0 for s in signs)

    def boundary_nodes(
        self,
        nodes_arc: int = 128,
        nodes_segment: int = 64,
        nodes_notch: int = 32,
        notch_radius: float = 1e-3,
    ):
        """Gauss-Legendre nodes and |dz| weights along the boundary, with the
        vertex at 1 rounded off by an inward circular notch."""
        s = self.radius
        tp, tm = self.tangent_points()
        delta = float(notch_radius)
        if not 0.0 < delta < abs(tp - 1.0):
            raise ValueError("notch radius must be positive and smaller than the tangent length")
        qp = 1.0 + delta * (tp - 1.0) / abs(tp - 1.0)
        qm = 1.0 + delta * (tm - 1.0) / abs(tm - 1.0)

        zs: List[complex] = []
        ws: List[float] = []

        def add_segment(a: complex, b: complex, n: int) -> None:
            x, w = np.polynomial.legendre.leggauss(n)
            mid, half = (a + b) / 2.0, (b - a) / 2.0
            zs.extend(mid + half * x)
            ws.extend(np.abs(half) * w)

        def add_arc(center: complex, radius: float, a1: float, a2: float, n: int) -> None:
            x, w = np.polynomial.legendre.leggauss(n)
            mid, half = (a1 + a2) / 2.0, (a2 - a1) / 2.0
            ang = mid + half * x
            zs.extend(center + radius * np.exp(1j * ang))
            ws.extend(radius * abs(half) * w)

        phi = math.pi / 2 - self.gamma
        add_arc(0.0, s, phi, 2.0 * math.pi - phi, nodes_arc)
        add_segment(tp, qp, nodes_segment)
        add_segment(tm, qm, nodes_segment)
        psi = math.atan2(float(np.imag(tp - 1.0)), float(np.real(tp - 1.0)))
        add_arc(1.0, delta, -psi, psi - 2.0 * math.pi, nodes_notch)
        return np.asarray(zs, dtype=complex), np.asarray(ws, dtype=float)


def stolz_membership(z: complex, domain: StolzDomain) -> bool:
    """True iff z lies in the open domain B_gamma."""
    return domain.contains(z)


def min_stolz_angle(
    t: SuperOp, margin: float = 1e-2, resolution: float = 1e-3
) -> Optional[float]:
    """Smallest angle gamma (up to ``resolution``) such that every eigenvalue
    of T other than 1 lies in B_(gamma - margin); None if no angle works."""
    if not margin > 0:
        raise ValueError("margin must be positive")
    lam = [complex(z) for z in t.eigenvalues() if abs(complex(z) - 1.0) > 1e-12]

    def feasible(gamma: float) -> bool:
        g = gamma - margin
        if not 0.0 < g < math.pi / 2:
            return False
        dom = StolzDomain(g)
        return all(dom.contains(z) for z in lam)

    lo = margin + 1e-9
    hi = math.pi / 2 - 1e-9
    if not feasible(hi):
        return None
    if feasible(lo):
        return lo
    while hi - lo > resolution:
        mid = (lo + hi) / 2.0
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Ritt constants
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class RittReport:
    power_bound: NormBracket
    diff_bound: NormBracket
    resolvent_bound: NormBracket
    spectral_radius: float
    n_max: int
    p: float
    r_grid: np.ndarray
    theta_count: int
    flagged: List[complex]


def ritt_constants(
    t: SuperOp,
    n_max: int = 64,
    p: float = 2.0,
    r_grid: Optional[Sequence[float]] = None,
    theta_count: int = 64,
) -> RittReport:
    """Suprema over n <= n_max of ||T^n|| and n ||T^n - T^(n-1)|| plus a
    resolvent scan on lambda = 1 + r e^(i theta) with |lambda| > 1."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    power_brackets = [t.power(0).op_norm_bracket(p)]
    diff_brackets = []
    prev = t.power(0)
    for n in range(1, n_max + 1):
        cur = prev.compose(t) if n > 1 else t
        power_brackets.append(cur.op_norm_bracket(p))
        diff_brackets.append(((cur - prev) * float(n)).op_norm_bracket(p))
        prev = cur

    if r_grid is None:
        r_grid = np.logspace(-3, 1, 13)
    r_grid = np.asarray(r_grid, dtype=float)
    flagged: List[complex] = []
    res_brackets = []
    thetas = np.arange(theta_count) * (2.0 * math.pi / theta_count)
    for r in r_grid:
        for th in thetas:
            lam = 1.0 + r * np.exp(1j * th)
            if abs(lam) <= 1.0:
                continue
            try:
                res = t.resolvent(lam)
            except SpectrumHit:
                flagged.append(complex(lam))
                continue
            res_brackets.append(res.op_norm_bracket(p).scaled(abs(lam - 1.0)))

    return RittReport(
        power_bound=NormBracket.elementwise_max(power_brackets),
        diff_bound=NormBracket.elementwise_max(diff_brackets),
        resolvent_bound=NormBracket.elementwise_max(res_brackets),
        spectral_radius=t.spectral_radius(),
        n_max=n_max,
        p=float(p),
        r_grid=r_grid,
        theta_count=theta_count,
        flagged=flagged,
    )


# ---------------------------------------------------------------------------
# Col / Row boundedness sampling
# ---------------------------------------------------------------------------


def _bound_sample(family, p, trials, seed, norm_fn) -> float:
    ops = list(family)
    if not ops or trials < 1:
        raise ValueError("need a nonempty family and trials >= 1")
    n = ops[0].dim
    best = 0.0
    for trial in range(trials):
        gen = rngmod.substream(seed, trial)
        k = int(gen.integers(1, 9))
        picks = gen.integers(0, len(ops), size=k)
        x = rngmod.random_block_vec(gen, k, n)
        tx = np.stack([ops[int(i)].apply(x[j]) for j, i in enumerate(picks)])
        denom = norm_fn(as_block_vec(x), p)
        if denom == 0.0:
            continue
        best = max(best, norm_fn(as_block_vec(tx), p) / denom)
    return best


def col_bound_sample(family, p, trials: int = 200, seed: int = 0) -> float:
    """Sampled lower bound for the Col bound of a family of operators."""
    return _bound_sample(family, float(p), trials, seed, column_norm)


def row_bound_sample(family, p, trials: int = 200, seed: int = 0) -> float:
    """Sampled lower bound for the Row bound of a family of operators."""
    return _bound_sample(family, float(p), trials, seed, row_norm)


# ---------------------------------------------------------------------------
# fractional powers and functional calculus
# ---------------------------------------------------------------------------


def _branch_cut_distance(z: complex) -> float:
    # distance from z to the ray [1, +inf), the branch cut of (1-z)^alpha
    if z.real >= 1.0:
        return abs(z.imag)
    return abs(z - 1.0)


def fractional_power(t: SuperOp, alpha: float) -> SuperOp:
    """(I - T)^alpha, principal branch; exact composition for integer alpha."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if abs(alpha - round(alpha)) < 1e-12:
        return (t._one() - t).power(int(round(alpha)))
    return t.matfun(lambda z: (1.0 - z) ** alpha, singularity_distance=_branch_cut_distance)


def poly_eval(coeffs, z):
    """Evaluate a polynomial with ascending coefficients."""
    return np.polynomial.polynomial.polyval(z, np.asarray(coeffs, dtype=complex))


def poly_apply(t: SuperOp, coeffs) -> SuperOp:
    """phi(T) by Horner's rule; stays structured for multiplication operators."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("polynomial coefficients must be a nonempty 1-d sequence")
    one = t._one()
    acc = one * complex(c[-1])
    for k in range(c.size - 2, -1, -1):
        acc = acc.compose(t) + one * complex(c[k])
    return acc


def _check_spectrum_in_domain(t: SuperOp, domain: StolzDomain, notch_radius: float) -> None:
    for z in t.eigenvalues():
        z = complex(z)
        if abs(z - 1.0) <= notch_radius:
            raise ValueError(
                f"eigenvalue {z} is within the vertex notch |z-1| <= {notch_radius}; "
                "calculus bounds require 1 outside the spectrum"
            )
        if not domain.contains(z):
            raise ValueError(f"eigenvalue {z} lies outside the open Stolz domain")


def _contour_majorant(t, domain, coeffs, p, nodes_arc, nodes_segment, nodes_notch, notch_radius):
    zs, ws = domain.boundary_nodes(nodes_arc, nodes_segment, nodes_notch, notch_radius)
    total = 0.0
    for z, w in zip(zs, ws):
        rnorm = t.resolvent(z).op_norm_bracket(p).upper
        total += w * abs(poly_eval(coeffs, z)) * rnorm
    return total / (2.0 * math.pi)


def fc_upper_bound(
    t: SuperOp,
    domain: StolzDomain,
    coeffs,
    p: float = 2.0,
    nodes: int = 64,
    notch_radius: float = 1e-3,
):
    """Cauchy-integral majorant (1/2 pi) oint |phi| ||R(z, T)|| |dz| >= ||phi(T)||.

    Returns (bound, estimated quadrature error); the error is estimated by
    node doubling and the returned bound uses the doubled node counts.
    """
    _check_spectrum_in_domain(t, domain, notch_radius)
    arc, seg, notch = 2 * nodes, nodes, max(nodes // 2, 8)
    coarse = _contour_majorant(t, domain, coeffs, p, arc, seg, notch, notch_radius)
    fine = _contour_majorant(t, domain, coeffs, p, 2 * arc, 2 * seg, 2 * notch, notch_radius)
    return fine, abs(fine - coarse)


def fc_lower_bound(
    t: SuperOp,
    domain: StolzDomain,
    degree: int = 8,
    trials: int = 50,
    p: float = 2.0,
    seed: int = 0,
    boundary_samples: int = 2048,
) -> float:
    """Sampled lower bound for the H^inf(B_gamma) calculus constant:
    max over polynomials of ||phi(T)|| / sup_boundary |phi|."""
    _check_spectrum_in_domain(t, domain, notch_radius=1e-13)
    zs, _ = domain.boundary_nodes(boundary_samples, boundary_samples // 2, 8, 1e-9)
    best = 0.0
    polys = [np.array([1.0 + 0.0j])]
    for trial in range(trials):
        gen = rngmod.substream(seed, trial)
        d = int(gen.integers(0, degree + 1))
        c = gen.standard_normal(d + 1) + 1j * gen.standard_normal(d + 1)
        polys.append(c)
    for c in polys:
        sup = float(np.max(np.abs(poly_eval(c, zs))))
        sup = max(sup, abs(complex(poly_eval(c, 1.0))))  # vertex of the hull
        if sup == 0.0:
            continue
        best = max(best, poly_apply(t, c).op_norm_bracket(p).lower / sup)
    return best


def cb_lower_bound(
    t: SuperOp,
    m: int,
    p: float,
    coeffs,
    trials: int = 20,
    seed: int = 0,
) -> float:
    """Sampled lower bound for ||phi(T)||_cb at amplification level m:
    ratios ||(I_m (x) phi(T)) Y|| / ||Y|| over random Y in S^p_(mn).

    Level-1 samples are embedded as the top-left block at every level, so the
    bound is nondecreasing in m for a shared seed.
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be >= 1")
    phi_t = poly_apply(t, coeffs)
    n = t.dim

    def amplified_ratio(y: np.ndarray) -> float:
        denom = schatten_norm(y, p)
        if denom == 0.0:
            return 0.0
        blocks = y.shape[0] // n
        z = np.zeros_like(y)
        for i in range(blocks):
            for j in range(blocks):
                z[i * n : (i + 1) * n, j * n : (j + 1) * n] = phi_t.apply(
                    y[i * n : (i + 1) * n, j * n : (j + 1) * n]
                )
        return schatten_norm(z, p) / denom

    best = 0.0
    for trial in range(trials):
        y1 = rngmod.random_matrix(rngmod.substream(seed, trial), n)
        if m == 1:
            best = max(best, amplified_ratio(y1))
            continue
        embedded = np.zeros((m * n, m * n), dtype=complex)
        embedded[:n, :n] = y1
        best = max(best, amplified_ratio(embedded))
        y = rngmod.random_matrix(rngmod.substream(seed, (m << 32) + trial), m * n)
        best = max(best, amplified_ratio(y))
    return best
