import math

import numpy as np
import pytest

from rittkit.decomp import (
    Z_apply,
    Z_star_apply,
    decompose,
    hankel_regular_check,
    power_series_partial,
    reconstruct_identity,
    reconstruction_partial,
)
from rittkit.matcore import schatten_norm, trace_pairing
from rittkit.rng import random_block_vec, random_matrix, substream
from rittkit.sqfun import SqSpec, square_function
from rittkit.stolzexample import make_diag_a
from rittkit.superop import SuperOp


class TestScalarSeries:
    def test_power_series_on_disc(self):
        gen = substream(61, 0)
        for _ in range(100):
            z = 0.9 * math.sqrt(gen.random()) * np.exp(2j * math.pi * gen.random())
            target = (1.0 - z) ** -2.0
            got = power_series_partial(z, 4000)
            assert abs(got - target) <= 1e-8 * abs(target)

    def test_reconstruction_series_is_one(self):
        assert reconstruction_partial(0.5, 200) == pytest.approx(1.0, abs=1e-12)
        gen = substream(61, 1)
        for _ in range(100):
            z = 0.9 * math.sqrt(gen.random()) * np.exp(2j * math.pi * gen.random())
            assert abs(reconstruction_partial(z, 4000) - 1.0) <= 1e-10


class TestZOperators:
    def test_zero_input(self):
        _, la, _ = make_diag_a(4)
        assert np.max(np.abs(Z_apply(la, np.zeros((4, 4)), 5))) == 0.0
        assert np.max(np.abs(Z_star_apply(la, np.zeros((5, 4, 4))))) == 0.0

    def test_first_block_of_z(self):
        diag, la, _ = make_diag_a(4)
        y = random_matrix(substream(62, 0), 4)
        blocks = Z_apply(la, y, 3)
        a = np.diag(diag.entries)
        # adjoint of left multiplication is right multiplication
        expected = (y @ (np.eye(4) + a) @ (np.eye(4) + a)) @ (np.eye(4) - a)
        assert np.max(np.abs(blocks[0] - expected)) < 1e-12

    def test_single_block_z_star(self):
        diag, la, _ = make_diag_a(4)
        u1 = random_matrix(substream(62, 1), 4)
        out = Z_star_apply(la, u1[None, :, :])
        a = np.diag(diag.entries)
        head = (np.eye(4) + a) @ (np.eye(4) + a) @ (np.eye(4) - a)
        assert np.max(np.abs(out - head @ u1)) < 1e-12

    def test_z_blocks_diagonal_scalar_oracle(self):
        # adjoint of L_a is R_a, so (Z y)_k scales column j of y by
        # sqrt(k) a_j^(k-1) (1 + a_j)^2 (1 - a_j)
        diag, la, _ = make_diag_a(4)
        y = random_matrix(substream(62, 60), 4)
        blocks = Z_apply(la, y, 6)
        a = diag.entries
        for k in range(1, 7):
            scal = math.sqrt(k) * a ** (k - 1) * (1.0 + a) ** 2 * (1.0 - a)
            assert np.max(np.abs(blocks[k - 1] - y * scal[None, :])) < 1e-12

    def test_adjointness_on_random_pairs(self):
        _, la, _ = make_diag_a(4)
        gen_idx = 0
        for _ in range(50):
            gen = substream(62, 2 + gen_idx)
            gen_idx += 1
            k = int(gen.integers(1, 8))
            u = random_block_vec(gen, k, 4)
            y = random_matrix(gen, 4)
            zy = Z_apply(la, y, k)
            lhs = trace_pairing(Z_star_apply(la, u), y)
            rhs = sum(trace_pairing(u[i], zy[i]) for i in range(k))
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestReconstructIdentity:
    def test_zero_operator(self):
        op = SuperOp.left_mult(np.zeros((3, 3)))
        x = random_matrix(substream(63, 0), 3)
        assert np.max(np.abs(reconstruct_identity(op, x, k=7) - x)) < 1e-14

    def test_la_damped(self):
        _, la, _ = make_diag_a(6)
        x = random_matrix(substream(63, 1), 6)
        out = reconstruct_identity(la, x, rho=0.99)
        assert schatten_norm(out - x, 2.0) <= 1e-8 * schatten_norm(x, 2.0)

    def test_contractivity_required(self):
        op = SuperOp.left_mult(np.eye(2))
        with pytest.raises(ValueError):
            reconstruct_identity(op, np.eye(2), rho=1.0)


class TestDecompose:
    def test_all_column_returns_input_and_zero(self):
        _, la, _ = make_diag_a(6)
        x = random_matrix(substream(64, 0), 6)
        res = decompose(la, x, 4.0 / 3.0, splitter="all-column", tol=1e-8)
        assert schatten_norm(res.x1 - x, 2.0) <= 1e-8 * schatten_norm(x, 2.0)
        assert np.max(np.abs(res.x2)) == 0.0
        assert res.residual <= 1e-8

    def test_all_row_mirror(self):
        _, la, _ = make_diag_a(6)
        x = random_matrix(substream(64, 1), 6)
        res = decompose(la, x, 4.0 / 3.0, splitter="all-row", tol=1e-8)
        assert np.max(np.abs(res.x1)) == 0.0
        assert schatten_norm(res.x2 - x, 2.0) <= 1e-8 * schatten_norm(x, 2.0)

    @pytest.mark.parametrize("splitter", ["rad-optimal", "thresholded"])
    def test_residual_certified_any_splitter(self, splitter):
        _, la, _ = make_diag_a(6)
        x = random_matrix(substream(64, 2), 6)
        res = decompose(la, x, 4.0 / 3.0, splitter=splitter, tol=1e-6)
        assert res.residual <= 1e-6
        assert np.isfinite(res.constant)

    def test_constant_bounded_across_seeds(self):
        _, la, _ = make_diag_a(6)
        consts = []
        for seed in range(8):
            x = random_matrix(substream(64, 10 + seed), 6)
            x /= schatten_norm(x, 4.0 / 3.0)
            res = decompose(la, x, 4.0 / 3.0, tol=1e-6)
            assert res.residual <= 1e-6
            consts.append(res.constant)
        assert max(consts) <= 50.0

    def test_difference_identity_for_x1(self):
        # (I - T) x1 = sum_k k^(1/2) T^(k-1) (I - T^2)^2 u_k at the shared K
        diag, la, _ = make_diag_a(5)
        x = random_matrix(substream(64, 30), 5)
        res = decompose(la, x, 4.0 / 3.0, splitter="all-column", tol=1e-8)
        k = res.k_used
        a = np.diag(diag.entries)
        eye = np.eye(5)
        u = np.empty((k, 5, 5), dtype=complex)
        cur = (eye - a) @ x
        for j in range(k):
            u[j] = math.sqrt(j + 1.0) * cur
            cur = a @ cur
        head = (eye - a @ a) @ (eye - a @ a)
        acc = np.zeros((5, 5), dtype=complex)
        apow = eye.copy()
        for j in range(k):
            acc += math.sqrt(j + 1.0) * (apow @ head @ u[j])
            apow = apow @ a
        lhs = (eye - a) @ res.x1
        assert np.max(np.abs(lhs - acc)) < 1e-8

    def test_split_consistency_with_square_function(self):
        _, la, _ = make_diag_a(4)
        x = random_matrix(substream(64, 40), 4)
        res = decompose(la, x, 4.0 / 3.0, tol=1e-6)
        split = square_function(la, x, SqSpec(p=4.0 / 3.0, kind="split", tol=1e-4))
        assert res.col_sq + res.row_sq >= split.lower - 1e-9

    def test_eigenvalue_one_rejected(self):
        op = SuperOp.left_mult(np.diag([1.0, 0.5]).astype(complex))
        with pytest.raises(ValueError, match="not injective|spectral radius"):
            decompose(op, np.eye(2), 4.0 / 3.0)

    def test_unknown_splitter(self):
        _, la, _ = make_diag_a(3)
        with pytest.raises(ValueError, match="splitter"):
            decompose(la, np.eye(3), 4.0 / 3.0, splitter="mystery")


class TestHankelCheck:
    def test_k1(self):
        assert hankel_regular_check(1) == pytest.approx(1.0, abs=1e-14)

    def test_stability_and_bound(self):
        v64 = hankel_regular_check(64)
        v128 = hankel_regular_check(128)
        assert abs(v128 - v64) <= 0.01
        assert v128 <= 2.0
