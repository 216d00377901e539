import math

import numpy as np
import pytest

from rittkit.matcore import schatten_norm, trace_pairing
from rittkit.rng import random_matrix, substream
from rittkit.superop import SpectrumHit, SuperOp


def sample_ops(n=4, seed=21):
    gen = substream(seed, 0)
    a = random_matrix(gen, n)
    m = random_matrix(gen, n)
    u, _ = np.linalg.qr(random_matrix(gen, n))
    v, _ = np.linalg.qr(random_matrix(gen, n))
    return {
        "left": SuperOp.left_mult(a),
        "right": SuperOp.right_mult(a),
        "schur": SuperOp.schur(m),
        "mixture": SuperOp.unitary_mixture([0.25, 0.75], [u, v]),
        "explicit": SuperOp.explicit(random_matrix(gen, n * n), n),
    }


@pytest.mark.parametrize("kind", ["left", "right", "schur", "mixture", "explicit"])
def test_apply_matches_matrix_representation(kind):
    op = sample_ops()[kind]
    gen = substream(22, 0)
    for _ in range(5):
        x = random_matrix(gen, op.dim)
        via_mat = (op.as_matrix() @ x.ravel()).reshape(op.dim, op.dim)
        assert np.max(np.abs(op.apply(x) - via_mat)) < 1e-10


@pytest.mark.parametrize("kind", ["left", "right", "schur", "mixture", "explicit"])
def test_trace_duality_adjoint(kind):
    op = sample_ops()[kind]
    adj = op.adjoint()
    gen = substream(23, 0)
    for _ in range(100):
        x = random_matrix(gen, op.dim)
        y = random_matrix(gen, op.dim)
        lhs = trace_pairing(op.apply(x), y)
        rhs = trace_pairing(x, adj.apply(y))
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


@pytest.mark.parametrize("kind", ["left", "right", "schur", "mixture", "explicit"])
def test_adjoint_involution(kind):
    op = sample_ops()[kind]
    back = op.adjoint().adjoint()
    assert np.max(np.abs(back.as_matrix() - op.as_matrix())) < 1e-12


def test_left_adjoint_is_right_with_same_symbol():
    a = random_matrix(substream(24, 0), 3)
    adj = SuperOp.left_mult(a).adjoint()
    assert adj.kind == "right"
    assert np.allclose(adj._payload, a)


def test_structured_algebra_closure():
    gen = substream(25, 0)
    a, b = random_matrix(gen, 3), random_matrix(gen, 3)
    la, lb = SuperOp.left_mult(a), SuperOp.left_mult(b)
    comp = la.compose(lb)
    assert comp.kind == "left"
    assert np.allclose(comp._payload, a @ b)
    ra, rb = SuperOp.right_mult(a), SuperOp.right_mult(b)
    comp = ra.compose(rb)
    assert comp.kind == "right"
    x = random_matrix(gen, 3)
    assert np.allclose(comp.apply(x), (x @ b) @ a)
    s = SuperOp.schur(a) + SuperOp.schur(b)
    assert s.kind == "schur"
    assert np.allclose(s._payload, a + b)


def test_power_matches_repeated_apply():
    gen = substream(26, 0)
    for op in sample_ops().values():
        x = random_matrix(gen, op.dim)
        expected = op.apply(op.apply(op.apply(x)))
        assert np.max(np.abs(op.power(3).apply(x) - expected)) < 1e-8
        assert np.max(np.abs(op.power(0).apply(x) - x)) < 1e-12


def test_resolvent_inverts():
    for op in sample_ops().values():
        lam = 3.0 + 0.5j
        res = op.resolvent(lam)
        gen = substream(27, 0)
        x = random_matrix(gen, op.dim)
        back = lam * res.apply(x) - op.apply(res.apply(x))
        assert np.max(np.abs(back - x)) < 1e-8


def test_resolvent_spectrum_hit():
    op = SuperOp.left_mult(np.diag([0.5, 0.25]).astype(complex))
    with pytest.raises(SpectrumHit):
        op.resolvent(0.5)


def test_matfun_schur_entrywise():
    m = np.array([[0.1, 0.2], [0.3, 0.4]])
    op = SuperOp.schur(m).matfun(lambda z: (1.0 - z) ** 0.5)
    assert op.kind == "schur"
    assert np.allclose(op._payload, np.sqrt(1.0 - m))


def test_op_norm_left_mult_exact():
    a = random_matrix(substream(28, 0), 4)
    top = np.linalg.svd(a, compute_uv=False)[0]
    for p in (1.0, 4.0 / 3.0, 2.0, 4.0, math.inf):
        br = SuperOp.left_mult(a).op_norm_bracket(p)
        assert br.exact
        assert br.lower == pytest.approx(top, rel=1e-12)


def test_op_norm_p2_exact_for_explicit():
    mat = random_matrix(substream(28, 1), 9)
    op = SuperOp.explicit(mat, 3)
    br = op.op_norm_bracket(2.0)
    assert br.exact
    assert br.lower == pytest.approx(np.linalg.svd(mat, compute_uv=False)[0], rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 4.0 / 3.0, 2.0, 4.0, math.inf])
def test_op_norm_bracket_sandwich(p):
    for op in sample_ops().values():
        br = op.op_norm_bracket(p)
        assert br.lower <= br.upper + 1e-12
        # sampled ratios can never exceed the upper bound
        gen = substream(29, 0)
        for _ in range(10):
            x = random_matrix(gen, op.dim)
            assert schatten_norm(op.apply(x), p) <= br.upper * schatten_norm(x, p) * (1 + 1e-9)


def test_kraus_upper_dominates_norm2():
    for op in sample_ops().values():
        assert op.kraus_upper() >= op.norm2() - 1e-9


def test_unitary_mixture_is_contraction_bracket():
    op = sample_ops()["mixture"]
    for p in (1.0, 2.0, 4.0, math.inf):
        assert op.op_norm_bracket(p).upper <= 1.0 + 1e-12


def test_unitary_mixture_rejects_non_unitary():
    with pytest.raises(ValueError, match="unitary"):
        SuperOp.unitary_mixture([1.0], [np.diag([2.0, 1.0])])


def test_explicit_shape_validation():
    with pytest.raises(ValueError):
        SuperOp.explicit(np.eye(5), 2)
