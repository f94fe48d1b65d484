import numpy as np
import pytest
import scipy.linalg as sl
import scipy.sparse.linalg as spl
import sympy

from artifact.grid import GridSpec, soliton_profiles, weighted_dot
from artifact.operators import (KINDS, OperatorSet, apply, assemble_operator, check_factorization,
                                convergence_ratios, discrete_soliton, discrete_translation_mode,
                                interior_sup, operator_identity_suite)

RATE = (3.5, 4.5)
_Y = sympy.symbols("y", real=True)


def symbolic(expr):
    """Vectorized callable for a sympy expression in y."""
    return sympy.lambdify(_Y, expr, "numpy")


def rate(fn, n=1025, L=40.0):
    g = GridSpec(L, n)
    a, b = fn(g), fn(g.refined())
    return a, b, a / b


def test_bandwidths(grid_small):
    expected = {"Lplus": 1, "Lminus": 1, "M": 1, "S": 1, "Sstar": 1, "Msquared": 2}
    for k in KINDS:
        op = assemble_operator(k, grid_small)
        assert op.bandwidth == expected[k]
        coo = op.matrix.tocoo()
        inner = (coo.row > 2) & (coo.row < grid_small.n - 3)
        assert np.max(np.abs(coo.row[inner] - coo.col[inner])) == expected[k]


def test_unknown_kind_and_grid_mismatch(grid_small):
    with pytest.raises(ValueError):
        assemble_operator("Laplace", grid_small)
    with pytest.raises(ValueError):
        apply(assemble_operator("M", grid_small), np.ones(grid_small.n + 1))


def test_M_on_constant(grid_default):
    out = apply(assemble_operator("M", grid_default), np.ones(grid_default.n))
    assert interior_sup(out - 1.0, 1) <= 1e-12


def _sym_residual(kind, f_expr, target_expr):
    f, t = symbolic(f_expr), symbolic(target_expr)

    def fn(g):
        return interior_sup(apply(assemble_operator(kind, g), f(g.y)) - t(g.y))
    return fn


Q_SYM = sympy.sqrt(2) / sympy.cosh(_Y)


@pytest.mark.parametrize("kind,f_expr,target", [
    ("Lminus", Q_SYM, 0 * _Y),
    ("Lplus", sympy.diff(Q_SYM, _Y), 0 * _Y),
    ("Lplus", (Q_SYM + _Y * sympy.diff(Q_SYM, _Y)) / 2, -Q_SYM),
    ("Lminus", _Y * Q_SYM, -2 * sympy.diff(Q_SYM, _Y)),
    ("M", sympy.exp(-_Y**2), sympy.exp(-_Y**2) - sympy.diff(sympy.exp(-_Y**2), _Y, 2)),
    ("Msquared", sympy.exp(-_Y**2),
     sympy.diff(sympy.exp(-_Y**2), _Y, 4) - 2 * sympy.diff(sympy.exp(-_Y**2), _Y, 2) + sympy.exp(-_Y**2)),
    ("S", _Y * Q_SYM, Q_SYM),
    ("Sstar", sympy.exp(-_Y**2), -sympy.diff(sympy.exp(-_Y**2), _Y) + sympy.tanh(_Y) * sympy.exp(-_Y**2)),
])
def test_symbols_second_order(kind, f_expr, target):
    a, b, r = rate(_sym_residual(kind, f_expr, target))
    assert RATE[0] <= r <= RATE[1], (a, b, r)


def test_S_Q_second_order():
    # the central stencil plus the closed-form tanh cancels only to O(h^2)
    a, b, r = rate(lambda g: interior_sup(apply(assemble_operator("S", g), soliton_profiles(g).q), 1))
    assert RATE[0] <= r <= RATE[1]


def test_factorization_kernel_and_rate():
    for name in ("q", "yq", "gaussian"):
        g = GridSpec(40.0, 2049)
        ops_c, ops_f = OperatorSet(g), OperatorSet(g.refined())
        fam_c = {"q": ops_c.p.q, "yq": ops_c.p.y_q, "gaussian": np.exp(-g.y**2)}
        gf = g.refined()
        fam_f = {"q": ops_f.p.q, "yq": ops_f.p.y_q, "gaussian": np.exp(-gf.y**2)}
        r = check_factorization(fam_c[name], ops_c) / check_factorization(fam_f[name], ops_f)
        assert RATE[0] <= r <= RATE[1], (name, r)


@pytest.mark.parametrize("chain", [("S", "S", "Lplus", "Lminus"), ("Msquared", "S", "S")])
@pytest.mark.parametrize("name", ["q", "y_q"])
def test_both_sides_of_factorization_vanish_on_kernel(chain, name):
    # six derivatives deep, so only the rate is meaningful
    def fn(g):
        ops = OperatorSet(g)
        return interior_sup(ops(*chain, getattr(ops.p, name)))
    a, b, r = rate(fn, n=2049)
    assert RATE[0] <= r <= RATE[1], (a, b, r)


def test_identity_suite_rates():
    ratios = convergence_ratios(GridSpec(40.0, 2049))
    for k, v in ratios.items():
        if k == "S_adjoint":
            continue
        assert RATE[0] <= v["ratio"] <= RATE[1], (k, v)


def test_adjointness(grid_default):
    rep = operator_identity_suite(grid_default)
    assert rep["S_adjoint"] <= 1e-8


def test_S2_Q_sin(grid_default):
    ops = OperatorSet(grid_default)
    g2 = np.sin(grid_default.y)
    assert interior_sup(ops("S", "S", ops.p.q * g2) - ops.p.q * (-g2)) <= 1e-2


def test_Lminus_symmetric(grid_default):
    lm = assemble_operator("Lminus", grid_default).interior_matrix()
    assert abs(lm - lm.T).max() <= 1e-12


def test_poschl_teller_Lplus(grid_default):
    g = grid_default
    lp = assemble_operator("Lplus", g).interior_matrix().tocsc()
    vals, vecs = spl.eigsh(lp, k=2, sigma=-4.0, which="LM")
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    assert abs(vals[0] + 3.0) <= 1e-3
    # ground state of -d^2 - 6 sech^2 is sech^2
    angle = sl.subspace_angles(vecs[:, :1], (1.0 / np.cosh(g.y[g.interior]) ** 2)[:, None])[0]
    assert angle <= 1e-3
    assert abs(vals[1]) <= 1e-3


def test_poschl_teller_Lminus(grid_default):
    g = grid_default
    lm = assemble_operator("Lminus", g).interior_matrix().tocsc()
    vals = np.sort(spl.eigsh(lm, k=3, sigma=-1.0, which="LM", return_eigenvectors=False))
    assert abs(vals[0]) <= 1e-3
    assert vals[1] > 1.0 - 1e-2


def test_M_box_mode(grid_default):
    g = grid_default
    val = spl.eigsh(assemble_operator("M", g).interior_matrix().tocsc(), k=1, sigma=0.0,
                    which="LM", return_eigenvectors=False)[0]
    assert abs(val - (1.0 + (np.pi / (2.0 * g.L)) ** 2)) <= 1e-6


def test_discrete_soliton(grid_pencil):
    g = grid_pencil
    q = discrete_soliton(g)
    assert np.all(q[1:-1] > 0) and q[0] == q[-1] == 0.0
    assert np.max(np.abs(q - q[::-1])) <= 1e-14
    lm = assemble_operator("Lminus", g, q=q).interior_matrix()
    assert np.max(np.abs(lm @ q[1:-1])) <= 1e-10
    # close to the analytic profile at second order
    err = np.max(np.abs(q - soliton_profiles(g).q))
    g2 = g.refined()
    err2 = np.max(np.abs(discrete_soliton(g2) - soliton_profiles(g2).q))
    assert RATE[0] <= err / err2 <= RATE[1]


def test_translation_mode(grid_pencil):
    g = grid_pencil
    q = discrete_soliton(g)
    v, val = discrete_translation_mode(g, q)
    assert abs(val) <= 1e-10
    assert np.max(np.abs(v + v[::-1])) <= 1e-8  # odd
    qp = soliton_profiles(g).q_prime
    assert weighted_dot(v, qp, g) == pytest.approx(weighted_dot(qp, qp, g), rel=1e-12)
