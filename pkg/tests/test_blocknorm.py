import math

import numpy as np
import pytest
from scipy.optimize import minimize

from rittkit.blocknorm import (
    column_norm,
    duality_check,
    op_matrix_apply,
    rad_norm_bracket,
    regular_norm,
    row_norm,
)
from rittkit.matcore import schatten_norm
from rittkit.rng import random_block_vec, random_matrix, substream
from rittkit.superop import SuperOp


def unit(i, j, n=2):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


E11 = unit(0, 0)
E21 = unit(1, 0)


class TestColumnRowNorms:
    @pytest.mark.parametrize("p", [1.0, 4.0 / 3.0, 2.0, 4.0, math.inf])
    def test_single_block_is_schatten_norm(self, p):
        x = random_matrix(substream(31, 0), 4)
        assert column_norm([x], p) == pytest.approx(schatten_norm(x, p), rel=1e-12)
        assert row_norm([x], p) == pytest.approx(schatten_norm(x, p), rel=1e-12)

    def test_p2_trace_additivity(self):
        b = random_block_vec(substream(31, 1), 4, 3)
        expected = math.sqrt(sum(schatten_norm(x, 2.0) ** 2 for x in b))
        assert column_norm(b, 2.0) == pytest.approx(expected, rel=1e-12)

    def test_hand_oracle_e11_e21(self):
        # sum x_k^* x_k = 2 e11 -> col = 2^(1/2); sum x_k x_k^* = I -> row = 2^(1/4)
        blocks = np.stack([E11, E21])
        assert column_norm(blocks, 4.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert row_norm(blocks, 4.0) == pytest.approx(2.0 ** 0.25, rel=1e-12)

    def test_hermitian_blocks_col_equals_row(self):
        gen = substream(31, 2)
        b = random_block_vec(gen, 3, 4)
        b = (b + np.conj(np.transpose(b, (0, 2, 1)))) / 2.0
        for p in (4.0 / 3.0, 4.0):
            assert column_norm(b, p) == pytest.approx(row_norm(b, p), rel=1e-12)

    def test_col_equals_row_at_p2(self):
        for trial in range(20):
            b = random_block_vec(substream(31, 3 + trial), 3, 3)
            assert column_norm(b, 2.0) == pytest.approx(row_norm(b, 2.0), rel=1e-10)

    @pytest.mark.parametrize("p", [1.0, 4.0 / 3.0, 2.0, 4.0])
    def test_matches_stacked_block_column(self, p):
        # col_p equals the Schatten norm of the tall block column embedded
        # in the (K n) x (K n) algebra
        gen = substream(31, 40)
        k, n = 3, 3
        b = random_block_vec(gen, k, n)
        stacked = np.zeros((k * n, k * n), dtype=complex)
        for i in range(k):
            stacked[i * n : (i + 1) * n, :n] = b[i]
        assert column_norm(b, p) == pytest.approx(schatten_norm(stacked, p), rel=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            column_norm(np.ones((0, 2, 2)), 2.0)


class TestRadBracket:
    def test_p_ge_2_exact_max(self):
        gen = substream(32, 0)
        b = random_block_vec(gen, 3, 3)
        hb = (b + np.conj(np.transpose(b, (0, 2, 1)))) / 2.0
        rb = rad_norm_bracket(hb, 4.0)
        assert rb.lower == rb.upper
        assert rb.lower == pytest.approx(column_norm(hb, 4.0), rel=1e-12)

    def test_single_block_upper_at_most_min(self):
        x = random_matrix(substream(32, 1), 3)
        rb = rad_norm_bracket([x], 4.0 / 3.0)
        bound = min(column_norm([x], 4.0 / 3.0), row_norm([x], 4.0 / 3.0))
        assert rb.upper <= bound + 1e-9

    def test_e11_e21_bracket_and_oracle(self):
        blocks = np.stack([E11, E21])
        p = 4.0 / 3.0
        rb = rad_norm_bracket(blocks, p, tol=1e-3)
        assert rb.gap <= 1e-3
        # independent oracle: multistart Nelder-Mead over the decomposition
        def objective(z):
            v = (z[:8] + 1j * z[8:]).reshape(2, 2, 2)
            return column_norm(blocks - v, p) + row_norm(v, p)

        oracle = math.inf
        gen = substream(32, 2)
        for _ in range(4):
            z0 = np.concatenate(
                [0.5 * blocks.real.ravel(), 0.5 * blocks.imag.ravel()]
            ) + 0.1 * gen.standard_normal(16)
            res = minimize(objective, z0, method="Powell",
                           options={"maxiter": 40000, "xtol": 1e-10, "ftol": 1e-14})
            oracle = min(oracle, res.fun)
        # frozen from the oracle runs: the infimum here equals sqrt(2)
        assert oracle == pytest.approx(math.sqrt(2.0), abs=1e-9)
        assert rb.lower <= oracle + 1e-6
        assert rb.upper >= oracle - 1e-6

    def test_sandwich_on_random_instances(self):
        for trial in range(5):
            gen = substream(32, 10 + trial)
            b = random_block_vec(gen, 3, 3)
            rb = rad_norm_bracket(b, 4.0 / 3.0, max_iter=1200, dual_starts=8)
            assert rb.lower <= rb.upper + 1e-12
            feasible = column_norm(rb.witness_u, 4.0 / 3.0) + row_norm(rb.witness_v, 4.0 / 3.0)
            assert feasible == pytest.approx(rb.upper, rel=1e-9)
            assert np.max(np.abs((rb.witness_u + rb.witness_v) - b)) < 1e-12

    def test_invalid_exponent(self):
        with pytest.raises(ValueError):
            rad_norm_bracket([np.eye(2)], 1.0)


class TestDuality:
    def test_zero_right_factor(self):
        x = random_block_vec(substream(33, 0), 2, 3)
        assert duality_check(x, np.zeros_like(x), 4.0 / 3.0)

    def test_unit_pair(self):
        x = np.stack([E11])
        assert duality_check(x, x, 4.0 / 3.0)

    def test_hundred_random_pairs(self):
        for trial in range(100):
            gen = substream(33, 1 + trial)
            k = int(gen.integers(1, 5))
            n = int(gen.integers(2, 5))
            x = random_block_vec(gen, k, n)
            y = random_block_vec(gen, k, n)
            assert duality_check(x, y, 4.0 / 3.0)


def power_iteration_norm(m, iters=500):
    # independent route to the spectral norm of the entrywise-absolute matrix
    a = np.abs(np.asarray(m, dtype=float))
    v = np.ones(a.shape[1]) / math.sqrt(a.shape[1])
    for _ in range(iters):
        w = a.T @ (a @ v)
        v = w / np.linalg.norm(w)
    return math.sqrt(float(v @ (a.T @ (a @ v))))


class TestRegularNorm:
    def test_all_ones(self):
        assert regular_norm(np.ones((2, 2))) == pytest.approx(2.0)

    def test_diagonal_with_sign(self):
        assert regular_norm(np.diag([1.0, -5.0])) == pytest.approx(5.0)

    def test_hankel_truncations_against_power_iteration(self):
        def hankel(k):
            i = np.arange(1, k + 1, dtype=float)
            return np.sqrt(np.outer(i, i)) / (i[:, None] + i[None, :] - 1.0) ** 2

        v64 = regular_norm(hankel(64))
        v128 = regular_norm(hankel(128))
        assert v64 == pytest.approx(power_iteration_norm(hankel(64)), rel=1e-8)
        assert v128 == pytest.approx(power_iteration_norm(hankel(128)), rel=1e-8)
        assert v64 <= v128 <= v64 + 0.01


class TestOpMatrixApply:
    def test_identity_table(self):
        b = random_block_vec(substream(34, 0), 3, 2)
        eye_op = SuperOp.identity(2)
        table = [[eye_op] * 3 for _ in range(3)]
        out = op_matrix_apply(np.eye(3), table, b)
        assert np.max(np.abs(out - b)) < 1e-12

    def test_zero_coefficients(self):
        b = random_block_vec(substream(34, 1), 2, 2)
        table = [[SuperOp.identity(2)] * 2 for _ in range(2)]
        out = op_matrix_apply(np.zeros((2, 2)), table, b)
        assert np.max(np.abs(out)) == 0.0

    def test_swap_with_left_multiplication(self):
        a = np.diag([0.5, 0.75]).astype(complex)
        la = SuperOp.left_mult(a)
        b = random_block_vec(substream(34, 2), 2, 2)
        c = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = op_matrix_apply(c, [[la, la], [la, la]], b)
        assert np.max(np.abs(out[0] - a @ b[1])) < 1e-12
        assert np.max(np.abs(out[1] - a @ b[0])) < 1e-12

    def test_col_bound_contraction(self):
        # reg-norm <= 1 coefficients with the contractive table T_ij = L_a
        a = np.diag([0.5, 0.75, 0.875]).astype(complex)
        la = SuperOp.left_mult(a)
        gen = substream(34, 3)
        for trial in range(10):
            k = 3
            c = gen.standard_normal((k, k))
            c /= regular_norm(c)
            b = random_block_vec(gen, k, 3)
            out = op_matrix_apply(c, [[la] * k for _ in range(k)], b)
            assert column_norm(out, 4.0) <= (1 + 1e-6) * column_norm(b, 4.0)

    def test_shape_validation(self):
        b = random_block_vec(substream(34, 4), 2, 2)
        with pytest.raises(ValueError):
            op_matrix_apply(np.eye(3), [[SuperOp.identity(2)] * 2] * 2, b)
