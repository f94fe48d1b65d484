import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from artifact.errors import ConfigError
from artifact.grid import GridSpec, soliton_profiles
from artifact.wave import (WaveParams, WaveState, decay_check, duhamel_solve, matrix_A, matrix_D,
                           matrix_P, ode_residual, orthogonality_from_edge,
                           orthogonality_residuals, propagator)

BETAS = [-0.7, -0.2, 0.0, 0.3, 0.9]


def test_wave_params_derived():
    wp = WaveParams(beta=0.0, omega=1e-2, lam=0.5)
    assert wp.epsilon == pytest.approx(0.05)
    assert wp.gamma == 0.0 and wp.kappa == 2.0
    assert WaveParams(0.5, 1e-2, 1.0).gamma == pytest.approx(0.8)


@pytest.mark.parametrize("beta", [1.0, -1.0, 1.5])
def test_beta_out_of_range(beta):
    with pytest.raises(ConfigError):
        matrix_A(beta)
    with pytest.raises(ConfigError):
        WaveParams(beta, 1e-2, 0.5)


def test_nonpositive_omega():
    with pytest.raises(ConfigError):
        WaveParams(0.0, 0.0, 0.5)


@pytest.mark.parametrize("beta", BETAS)
def test_eigen_decomposition(beta):
    a, p, d = matrix_A(beta), matrix_P(), matrix_D(beta)
    assert np.max(np.abs(a @ p - p @ d)) <= 1e-14
    vals = np.linalg.eigvals(a)
    want = np.array([1 / (1 + beta), -1 / (1 + beta), 1 / (1 - beta), -1 / (1 - beta)])
    assert np.allclose(np.sort(vals.imag), np.sort(want), atol=1e-12)
    assert np.max(np.abs(vals.real)) <= 1e-12


@pytest.mark.parametrize("beta", BETAS)
def test_propagator_matches_expm(beta):
    wp = WaveParams(beta, 1e-2, 0.8)
    a = matrix_A(beta)
    for y in (-50.0, -3.3, 0.0, 1.7, 12.0, 50.0):
        assert np.max(np.abs(propagator(y, wp) - expm(wp.epsilon * y * a))) <= 1e-12


def test_propagator_group_law():
    wp = WaveParams(0.4, 1e-3, 0.9)
    y1, y2 = np.array([-4.0, 2.5, 30.0]), np.array([1.0, -7.0, 11.0])
    lhs = propagator(y1, wp) @ propagator(y2, wp)
    assert np.max(np.abs(lhs - propagator(y1 + y2, wp))) <= 1e-13
    assert np.max(np.abs(propagator(0.0, wp) - np.eye(4))) == 0.0


def _sources(y):
    return 1.0 / np.cosh(y) ** 2, y * np.exp(-0.5 * y * y)


def _ivp_reference(g, wp, ys):
    """Backward RK integration from X(L)=0 with analytic sources."""
    a, k, gm = matrix_A(wp.beta), wp.kappa, wp.gamma

    def rhs(y, x):
        c1, s1 = _sources(y)
        q = np.sqrt(2.0) / np.cosh(y)
        f = k * np.array([-q * s1, q * c1, -gm * q * s1, gm * q * c1])
        return wp.epsilon * (a @ x + f)
    sol = solve_ivp(rhs, (g.L, -g.L), np.zeros(4), method="DOP853", t_eval=ys[::-1],
                    rtol=1e-12, atol=1e-14)
    return sol.y[:, ::-1]


@pytest.mark.parametrize("beta", [0.0, 0.5, -0.6])
def test_duhamel_matches_ivp(beta):
    wp = WaveParams(beta, 1e-2, 0.7)
    errs = []
    for n in (513, 1025):
        g = GridSpec(20.0, n)
        c1, s1 = _sources(g.y)
        x = duhamel_solve(g, wp, c1, s1).stack()
        ref = _ivp_reference(g, wp, g.y)
        errs.append(np.max(np.abs(x - ref)))
    assert errs[1] <= 1e-4
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_duhamel_right_edge_and_ode_rate():
    wp = WaveParams(0.3, 1e-2, 0.6)
    res = []
    for n in (513, 1025):
        g = GridSpec(20.0, n)
        c1, s1 = _sources(g.y)
        ws = duhamel_solve(g, wp, c1, s1)
        assert np.all(ws.stack()[:, -1] == 0.0)
        res.append(ode_residual(g, wp, ws, c1, s1))
    assert 3.5 <= res[0] / res[1] <= 4.5


def test_duhamel_zero_epsilon():
    g = GridSpec(10.0, 65)
    ws = duhamel_solve(g, WaveParams(0.0, 1e-2, 0.0), np.ones(g.n), np.ones(g.n))
    assert not np.any(ws.stack()) and ws.decays


def test_duhamel_linear(grid_small):
    g = grid_small
    wp = WaveParams(0.2, 1e-2, 0.5)
    c, s = _sources(g.y)
    a = duhamel_solve(g, wp, c, s).stack()
    b = duhamel_solve(g, wp, s, -c).stack()
    ab = duhamel_solve(g, wp, 2 * c + 3 * s, 2 * s - 3 * c).stack()
    assert np.max(np.abs(ab - (2 * a + 3 * b))) <= 1e-12


def test_orthogonality_parity(grid_small):
    # even C1, S1 = 0 at beta = 0: the odd-weight relations vanish by symmetry
    g = grid_small
    wp = WaveParams(0.0, 1e-2, 0.6)
    c1 = np.exp(-g.y**2)
    r = orthogonality_residuals(g, wp, c1, np.zeros(g.n))
    assert abs(r[1]) <= 1e-14 and abs(r[3]) <= 1e-14
    assert abs(r[0]) > 1e-2


def test_orthogonality_from_edge_consistent(grid_small):
    g = grid_small
    wp = WaveParams(0.35, 1e-2, 0.6)
    c1, s1 = _sources(g.y)
    ws = duhamel_solve(g, wp, c1, s1)
    direct = orthogonality_residuals(g, wp, c1, s1)
    edge = orthogonality_from_edge(g, wp, ws.stack()[:, 0])
    assert np.max(np.abs(direct - edge)) <= 1e-3 * np.max(np.abs(direct))


def test_decay_check():
    z = np.zeros(9)
    assert decay_check(WaveState(z, z, z, z), 0.0)
    bump = z.copy()
    bump[0] = 1e-3
    assert not decay_check(WaveState(z, bump, z, z), 1e-4)
    assert decay_check(WaveState(z, bump, z, z), 1e-3)


def test_wave_state_roundtrip():
    x = np.arange(12.0).reshape(4, 3)
    assert np.array_equal(WaveState.from_stack(x).stack(), x)


def test_soliton_profiles_nonzero(grid_small):
    assert soliton_profiles(grid_small).q.max() == pytest.approx(np.sqrt(2.0))
