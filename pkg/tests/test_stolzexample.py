import math

import numpy as np
import pytest

from rittkit.matcore import schatten_norm, singular_values
from rittkit.sqfun import SqSpec, square_function
from rittkit.stolzexample import (
    a_norm_bounds,
    growth_experiment,
    make_diag_a,
    matrix_A,
    rank_one_test,
)


class TestDiagA:
    def test_single_entry(self):
        diag, la, ra = make_diag_a(1)
        assert diag.entries[0] == pytest.approx(0.5)

    def test_three_entries(self):
        diag, _, _ = make_diag_a(3)
        assert np.allclose(diag.entries, [0.5, 0.75, 0.875])

    def test_spectral_radius(self):
        for n in (1, 4, 8):
            _, la, _ = make_diag_a(n)
            assert la.spectral_radius() == pytest.approx(1.0 - 2.0**-n, rel=1e-14)

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            make_diag_a(0)


class TestRankOneTest:
    def test_n1(self):
        assert np.allclose(rank_one_test(1), [[1.0]])

    def test_n4_entries_and_norms(self):
        x = rank_one_test(4)
        assert np.allclose(x, 0.5)
        assert np.allclose(singular_values(x), [2.0, 0.0, 0.0, 0.0], atol=1e-14)
        for p in (1.0, 2.0, 4.0, math.inf):
            assert schatten_norm(x, p) == pytest.approx(2.0, rel=1e-14)

    def test_outer_product_is_all_ones(self):
        x = rank_one_test(5)
        assert np.allclose(x @ x.conj().T, np.ones((5, 5)), atol=1e-14)


class TestMatrixA:
    def test_entry_11(self):
        assert matrix_A(1)[0, 0] == pytest.approx(4.0 / 9.0, rel=1e-14)

    def test_entry_12(self):
        assert matrix_A(2)[0, 1] == pytest.approx(8.0 / 25.0, rel=1e-14)

    def test_two_closed_forms_agree(self):
        n = 10
        a = 1.0 - 0.5 ** np.arange(1, n + 1)
        alt = np.outer(1.0 - a, 1.0 - a) / (1.0 - np.outer(a, a)) ** 2
        assert np.max(np.abs(matrix_A(n) - alt)) < 1e-12

    def test_positive_semidefinite_up_to_64(self):
        for n in (4, 16, 64):
            w = np.linalg.eigvalsh(matrix_A(n).real)
            assert w.min() >= -1e-12

    def test_norm_bounds(self):
        for n in range(1, 65):
            s1, s2sq = a_norm_bounds(n)
            assert s1 <= n + 1e-9
            assert s2sq <= (160.0 / 3.0) * n

    def test_n1_trace(self):
        s1, _ = a_norm_bounds(1)
        assert s1 == pytest.approx(4.0 / 9.0, rel=1e-12)


class TestGrowthExperiment:
    def test_p4_slope_and_normalized_column(self):
        table = growth_experiment(4.0, [4, 8, 16, 32, 64])
        assert table.ratio_numerator == "col"
        assert 0.2 <= table.slope <= 0.35
        assert table.expected_slope == pytest.approx(0.25)
        for row in table.rows:
            assert 0.5 <= row.col / math.sqrt(row.n) <= 0.67

    def test_p4_row_bounded_by_s2(self):
        table = growth_experiment(4.0, [4, 8, 16, 32, 64])
        for row in table.rows:
            assert row.row <= ((160.0 / 3.0) * row.n) ** 0.25 + 1e-9

    def test_ratio_monotone_in_n_at_p4(self):
        table = growth_experiment(4.0, [4, 8, 16, 32, 64])
        ratios = [r.ratio for r in table.rows]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_p3_slope_meets_interpolation_exponent(self):
        table = growth_experiment(3.0, [4, 8, 16, 32, 64])
        assert table.theta == pytest.approx(2.0 / 3.0)
        assert table.slope >= 1.0 / 6.0 - 0.05

    def test_dual_regime_grows(self):
        table = growth_experiment(4.0 / 3.0, [4, 8, 16, 32, 64])
        assert table.ratio_numerator == "row"
        assert table.slope > 0.1

    def test_truncated_series_matches_closed_forms(self):
        # independent route: certified series vs the closed-form table rows
        for n in (4, 8):
            diag, la, _ = make_diag_a(n)
            x = rank_one_test(n)
            table = growth_experiment(4.0, [n])
            col_series = square_function(la, x, SqSpec(p=4.0, kind="col", tol=1e-7)).value
            row_series = square_function(la, x, SqSpec(p=4.0, kind="row", tol=1e-7)).value
            assert col_series == pytest.approx(table.rows[0].col, rel=1e-5)
            assert row_series == pytest.approx(table.rows[0].row, rel=1e-5)

    def test_rejects_p2_and_empty(self):
        with pytest.raises(ValueError):
            growth_experiment(2.0, [4, 8])
        with pytest.raises(ValueError):
            growth_experiment(4.0, [])

    def test_threads_do_not_change_results(self):
        serial = growth_experiment(4.0, [4, 8, 16], threads=1)
        parallel = growth_experiment(4.0, [4, 8, 16], threads=4)
        for a, b in zip(serial.rows, parallel.rows):
            assert a.col == b.col and a.row == b.row and a.ratio == b.ratio
