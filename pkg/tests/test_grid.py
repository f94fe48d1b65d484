import numpy as np
import pytest
from scipy.integrate import quad

from artifact.errors import ConfigError
from artifact.grid import (GridSpec, build_grid, h_closed_form, h_profile, soliton_profiles,
                           trapezoid, weighted_dot)

# independent values: sqrt2 * ln 2, from the integral 2 ln 2 of z * 2 sech^2 z over (0, inf)
H_AT_ZERO = np.sqrt(2.0) * np.log(2.0)


def h_by_quadrature(y):
    """h(y) = (1/Q(y)) int_y^inf z Q(z)^2 dz by adaptive quadrature."""
    # the integrand is below 1e-40 beyond y + 50
    val, _ = quad(lambda z: z * 2.0 / np.cosh(z) ** 2, y, y + 50.0, epsabs=1e-12, epsrel=1e-10,
                  limit=200)
    return val * np.cosh(y) / np.sqrt(2.0)


def test_small_grid_nodes():
    g = build_grid(1.0, 9)
    assert np.allclose(g.y, [-1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1], atol=1e-15, rtol=0)


def test_default_spacing():
    assert build_grid(40.0, 2049).h == 80.0 / 2048 == 0.0390625


@pytest.mark.parametrize("L,n", [(40.0, 4), (1.0, 3), (0.0, 9), (-1.0, 9), (1.0, 9.5)])
def test_build_grid_rejects(L, n):
    with pytest.raises(ConfigError):
        build_grid(L, n)


def test_nodes_symmetric_and_uniform(grid_default):
    y = grid_default.y
    assert np.all(y == -y[::-1])
    assert y[(grid_default.n - 1) // 2] == 0.0
    assert np.max(np.abs(np.diff(y) - grid_default.h)) <= 1e-13


def test_profiles_invariants(grid_default):
    p = soliton_profiles(grid_default)
    assert p.q[(grid_default.n - 1) // 2] == np.sqrt(2.0)
    assert np.all(p.q > 0)
    assert np.max(np.abs(p.q_second + p.q**3 - p.q)) <= 1e-12
    y = grid_default.y
    assert np.allclose(p.lambda_q, 0.5 * (p.q + y * p.q_prime), rtol=0, atol=1e-15)
    assert np.all(p.h_aux > 0)


def test_q_squared_integral(grid_default):
    assert abs(trapezoid(soliton_profiles(grid_default).q_squared, grid_default) - 4.0) <= 1e-8


def test_weighted_dot_examples(grid_default):
    p = soliton_profiles(grid_default)
    g = grid_default
    assert abs(weighted_dot(p.y_q, p.q_prime, g) + 2.0) <= 1e-8
    assert abs(weighted_dot(p.q, p.q_prime, g)) <= 1e-12
    assert abs(weighted_dot(p.q, p.q, g) - 4.0) <= 1e-8
    w = np.exp(-g.y**2)
    assert weighted_dot(p.q, p.q, g, weight=w) == pytest.approx(trapezoid(p.q**2 * w, g), abs=1e-15)
    with pytest.raises(ValueError):
        weighted_dot(p.q[:-1], p.q, g)


def test_odd_quadrature_vanishes(grid_default):
    y = grid_default.y
    for f in (y * np.exp(-y * y), np.sin(y) / np.cosh(y), y**3 / np.cosh(y) ** 2):
        assert abs(trapezoid(f, grid_default)) <= 1e-12


def test_quadrature_second_order():
    errs = [abs(trapezoid(soliton_profiles(GridSpec(40.0, n)).q_squared, GridSpec(40.0, n)) - 4.0)
            for n in (33, 65)]
    # n = 33 is coarse enough that the trapezoid error is still visible
    assert errs[0] / max(errs[1], 1e-300) >= 3.5


def test_h_at_zero():
    assert abs(h_closed_form(0.0) - H_AT_ZERO) <= 1e-14
    assert abs(h_closed_form(0.0) - 0.980258) <= 1e-6


def test_h_closed_form_vs_quadrature(grid_default):
    g = grid_default
    mask = np.abs(g.y) <= 20.0
    sample = g.y[mask][::16]
    ref = np.array([h_by_quadrature(v) for v in sample])
    assert np.max(np.abs(h_profile(g)[mask][::16] - ref)) <= 1e-6


def test_h_growth_bound(grid_default):
    g = grid_default
    p = soliton_profiles(g)
    ratio = p.h_aux / ((1 + np.abs(g.y)) * p.q)
    assert np.isfinite(ratio).all()
    # the bound constant stays O(1) on the whole grid, including y = +-L
    assert 0.0 < np.max(ratio) < 2.0
