"""Named invariant suites for the check command.

Each suite is a list of (name, callable) pairs; a callable returns
(passed, detail).  Suites are deterministic: randomized checks derive their
data from fixed documented seeds.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import rng as rngmod
from .blocknorm import column_norm, duality_check, row_norm
from .decomp import power_series_partial, reconstruct_identity, reconstruction_partial
from .matcore import conjugate_exponent, schatten_norm
from .markov import schur_markov, unitary_mixture_markov
from .stolzexample import make_diag_a

__all__ = ["CheckResult", "available_suites", "run_suite"]


@dataclasses.dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _scalar_power_series() -> Tuple[bool, str]:
    gen = rngmod.substream(20240, 0)
    radii = 0.9 * np.sqrt(gen.random(100))
    angles = 2.0 * math.pi * gen.random(100)
    zs = radii * np.exp(1j * angles)
    worst = 0.0
    for z in zs:
        target = (1.0 - z) ** (-2.0)
        got = power_series_partial(z, 4000)
        worst = max(worst, abs(got - target) / abs(target))
    return worst <= 1e-8, f"max relative error {worst:.3e} over 100 points, |z| <= 0.9"


def _scalar_reconstruction() -> Tuple[bool, str]:
    gen = rngmod.substream(20240, 1)
    radii = 0.9 * np.sqrt(gen.random(100))
    angles = 2.0 * math.pi * gen.random(100)
    zs = radii * np.exp(1j * angles)
    worst = max(abs(reconstruction_partial(z, 4000) - 1.0) for z in zs)
    return worst <= 1e-10, f"max |series - 1| = {worst:.3e} over 100 points"


def _operator_reconstruction() -> Tuple[bool, str]:
    _, la, _ = make_diag_a(6)
    x = rngmod.random_matrix(rngmod.substream(20240, 2), 6)
    err = np.max(np.abs(reconstruct_identity(la, x, rho=0.99) - x)) / np.max(np.abs(x))
    return err <= 1e-8, f"relative reconstruction error {err:.3e}"


def _norm_axioms() -> Tuple[bool, str]:
    worst = 0.0
    for trial in range(50):
        gen = rngmod.substream(20241, trial)
        n = int(gen.integers(2, 7))
        x = rngmod.random_matrix(gen, n)
        y = rngmod.random_matrix(gen, n)
        for p in (1.0, 1.5, 2.0, 4.0, math.inf):
            nx, ny, nxy = schatten_norm(x, p), schatten_norm(y, p), schatten_norm(x + y, p)
            worst = max(worst, nxy - nx - ny)
            c = complex(gen.standard_normal() + 1j * gen.standard_normal())
            worst = max(worst, abs(schatten_norm(c * x, p) - abs(c) * nx))
    ok = worst <= 1e-10 * 100
    return ok, f"worst triangle/homogeneity defect {worst:.3e}"


def _hoelder() -> Tuple[bool, str]:
    worst = 0.0
    combos = [(2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (3.0, 6.0, 2.0), (4.0, 4.0 / 3.0, 1.0)]
    for trial in range(50):
        gen = rngmod.substream(20242, trial)
        n = int(gen.integers(2, 7))
        x = rngmod.random_matrix(gen, n)
        y = rngmod.random_matrix(gen, n)
        for p, q, r in combos:
            lhs = schatten_norm(x @ y, r)
            rhs = schatten_norm(x, p) * schatten_norm(y, q)
            worst = max(worst, lhs - rhs)
    return worst <= 1e-10 * 100, f"worst Hoelder defect {worst:.3e}"


def _unitary_invariance() -> Tuple[bool, str]:
    worst = 0.0
    for trial in range(25):
        gen = rngmod.substream(20243, trial)
        n = int(gen.integers(2, 7))
        x = rngmod.random_matrix(gen, n)
        u, _ = np.linalg.qr(rngmod.random_matrix(gen, n))
        v, _ = np.linalg.qr(rngmod.random_matrix(gen, n))
        for p in (1.0, 2.0, 4.0, math.inf):
            worst = max(
                worst, abs(schatten_norm(u @ x @ v, p) - schatten_norm(x, p))
            )
    return worst <= 1e-9, f"worst unitary-invariance defect {worst:.3e}"


def _col_row_p2() -> Tuple[bool, str]:
    worst = 0.0
    for trial in range(50):
        gen = rngmod.substream(20244, trial)
        k = int(gen.integers(1, 6))
        n = int(gen.integers(2, 6))
        b = rngmod.random_block_vec(gen, k, n)
        worst = max(worst, abs(column_norm(b, 2.0) - row_norm(b, 2.0)))
    return worst <= 1e-10 * 10, f"worst |col - row| at p = 2: {worst:.3e}"


def _duality() -> Tuple[bool, str]:
    p = 4.0 / 3.0
    fails = 0
    for trial in range(1000):
        gen = rngmod.substream(20245, trial)
        k = int(gen.integers(1, 5))
        n = int(gen.integers(2, 5))
        x = rngmod.random_block_vec(gen, k, n)
        y = rngmod.random_block_vec(gen, k, n)
        if not duality_check(x, y, p):
            fails += 1
    return fails == 0, f"{fails} failures out of 1000 at (p, p*) = (4/3, {conjugate_exponent(p):.3g})"


def _markov_validates() -> Tuple[bool, str]:
    idx = np.arange(4)
    m = schur_markov(0.9 ** np.abs(np.subtract.outer(idx, idx)))
    if not m.certificate.valid:
        return False, f"Toeplitz Schur map failed: {m.certificate.failed_flags()}"
    gen = rngmod.substream(20246, 0)
    u, _ = np.linalg.qr(rngmod.random_matrix(gen, 4))
    mix = unitary_mixture_markov([0.5, 0.5], [u, u.conj().T])
    if not mix.certificate.valid:
        return False, f"unitary mixture failed: {mix.certificate.failed_flags()}"
    return True, "Schur and unitary-mixture maps pass all certificate flags"


SUITES: Dict[str, List[Tuple[str, Callable[[], Tuple[bool, str]]]]] = {
    "identities": [
        ("scalar_power_series", _scalar_power_series),
        ("scalar_reconstruction", _scalar_reconstruction),
        ("operator_reconstruction", _operator_reconstruction),
    ],
    "norms": [
        ("norm_axioms", _norm_axioms),
        ("hoelder", _hoelder),
        ("unitary_invariance", _unitary_invariance),
        ("col_row_p2", _col_row_p2),
        ("duality", _duality),
    ],
    "markov": [
        ("markov_validates", _markov_validates),
    ],
}


def available_suites() -> List[str]:
    return sorted(SUITES)


def run_suite(name: str) -> List[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(available_suites())}")
    results = []
    for check_name, fn in SUITES[name]:
        passed, detail = fn()
        results.append(CheckResult(check_name, bool(passed), detail))
    return results
