"""First-order wave block: matrix A, its propagator and the right-tail Duhamel solve."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigError
from .grid import soliton_profiles, trapezoid


@dataclass(frozen=True)
class WaveParams:
    beta: float
    omega: float
    lam: float

    def __post_init__(self):
        if not -1.0 < self.beta < 1.0:
            raise ConfigError(f"beta outside (-1,1): {self.beta}", "params.beta")
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive: {self.omega}", "params.omega")

    @property
    def epsilon(self):
        return self.lam * np.sqrt(self.omega)

    @property
    def gamma(self):
        return 2.0 * self.beta / (1.0 + self.beta**2)

    @property
    def kappa(self):
        return 2.0 * (1.0 + self.beta**2) / (1.0 - self.beta**2)


def matrix_A(beta):
    if not -1.0 < beta < 1.0:
        raise ConfigError(f"beta outside (-1,1): {beta}", "params.beta")
    b = beta
    return np.array([[0.0, -b, 0.0, -1.0],
                     [b, 0.0, 1.0, 0.0],
                     [0.0, -1.0, 0.0, -b],
                     [1.0, 0.0, b, 0.0]]) / (1.0 - b * b)


def matrix_P():
    i = 1j
    return np.array([[i, -i, i, -i],
                     [-1, -1, 1, 1],
                     [-i, i, i, -i],
                     [1, 1, 1, 1]], dtype=complex)


def matrix_D(beta):
    return np.diag([1j / (1 + beta), -1j / (1 + beta), 1j / (1 - beta), -1j / (1 - beta)])


def trig_entries(y, wp):
    """The functions s+-, c+-, s_gamma+-, c_gamma+- evaluated at y."""
    y = np.asarray(y, dtype=float)
    e, b, gm = wp.epsilon, wp.beta, wp.gamma
    s1, c1 = np.sin(e * y / (1 + b)), np.cos(e * y / (1 + b))
    s2, c2 = np.sin(e * y / (1 - b)), np.cos(e * y / (1 - b))
    w1, w2 = 0.5 * (1 - gm), 0.5 * (1 + gm)
    return {
        "s+": 0.5 * (s1 + s2), "s-": 0.5 * (s1 - s2),
        "c+": 0.5 * (c1 + c2), "c-": 0.5 * (c1 - c2),
        "sg+": w1 * s1 + w2 * s2, "sg-": w1 * s1 - w2 * s2,
        "cg+": w1 * c1 + w2 * c2, "cg-": w1 * c1 - w2 * c2,
    }


def propagator(y, wp):
    """exp(epsilon y A) in closed form; shape (4, 4) or (..., 4, 4) for array y."""
    t = trig_entries(y, wp)
    sp_, sm, cp, cm = t["s+"], t["s-"], t["c+"], t["c-"]
    rows = [[cp, sm, -cm, -sp_],
            [-sm, cp, sp_, -cm],
            [-cm, -sp_, cp, sm],
            [sp_, -cm, -sm, cp]]
    return np.moveaxis(np.array(rows), (0, 1), (-2, -1))


def duhamel_integrand(y, wp, q, c1, s1):
    """Integrand Q (-cg+ S1 - sg- C1, -sg- S1 + cg+ C1, cg- S1 + sg+ C1, sg+ S1 - cg- C1)."""
    t = trig_entries(y, wp)
    return q * np.array([
        -t["cg+"] * s1 - t["sg-"] * c1,
        -t["sg-"] * s1 + t["cg+"] * c1,
        t["cg-"] * s1 + t["sg+"] * c1,
        t["sg+"] * s1 - t["cg-"] * c1,
    ])


@dataclass
class WaveState:
    c_v: np.ndarray
    s_v: np.ndarray
    c_n: np.ndarray
    s_n: np.ndarray
    decays: bool = None

    def stack(self):
        return np.array([self.c_v, self.s_v, self.c_n, self.s_n])

    @classmethod
    def from_stack(cls, x, decays=None):
        return cls(x[0], x[1], x[2], x[3], decays)


def duhamel_solve(g, wp, c1, s1, q=None):
    """Wave components decaying at +infinity, by the right-tail Duhamel formula."""
    if q is None:
        q = soliton_profiles(g).q
    y = g.y
    if wp.epsilon == 0.0:
        z = np.zeros(g.n)
        return WaveState(z, z.copy(), z.copy(), z.copy(), True)
    f = duhamel_integrand(y, wp, q, np.asarray(c1, float), np.asarray(s1, float))
    # right-to-left cumulative trapezoid: tail[:, i] = int_{y_i}^{L} f
    rev = cumulative_trapezoid(f[:, ::-1], dx=g.h, axis=1, initial=0.0)
    tail = rev[:, ::-1]
    m = propagator(y, wp)
    x = -wp.epsilon * wp.kappa * np.einsum("nij,jn->in", m, tail)
    return WaveState.from_stack(x)


def forcing(wp, q, c1, s1):
    """kappa (-Q S1, Q C1, -gamma Q S1, gamma Q C1)."""
    k, gm = wp.kappa, wp.gamma
    return k * np.array([-q * s1, q * c1, -gm * q * s1, gm * q * c1])


def ode_residual(g, wp, ws, c1, s1, q=None):
    """Interior sup of X' - eps (A X + forcing) with central differences."""
    if q is None:
        q = soliton_profiles(g).q
    x = ws.stack()
    dx = (x[:, 2:] - x[:, :-2]) / (2.0 * g.h)
    rhs = wp.epsilon * (matrix_A(wp.beta) @ x + forcing(wp, q, c1, s1))
    return float(np.max(np.abs(dx - rhs[:, 1:-1])))


def orthogonality_residuals(g, wp, c1, s1, q=None):
    """The four decay-at-both-ends relations, each as LHS - RHS."""
    if q is None:
        q = soliton_profiles(g).q
    y = g.y
    e, b = wp.epsilon, wp.beta
    ca, sa = np.cos(e * y / (1 + b)), np.sin(e * y / (1 + b))
    cb, sb = np.cos(e * y / (1 - b)), np.sin(e * y / (1 - b))
    qc, qs = q * c1, q * s1
    ip = lambda w, f: trapezoid(w * f, g)
    return np.array([
        ip(ca, qc) - ip(sa, qs),
        ip(sa, qc) + ip(ca, qs),
        ip(cb, qc) + ip(sb, qs),
        ip(sb, qc) - ip(cb, qs),
    ])


def decay_check(ws, tol):
    x = ws.stack()
    edge = np.max(np.abs(x[:, [0, -1]]))
    return bool(edge <= tol)


def orthogonality_from_edge(g, wp, x_left):
    """The four orthogonality residuals implied by the wave value X(-L).

    The right-tail Duhamel formula gives int M(-z) F(z) dz = -M(L) X(-L) / (eps kappa)
    over the whole grid; its components are invertible combinations of the
    residuals with weights (1 -+ gamma)/2.
    """
    i_vec = -propagator(g.L, wp) @ np.asarray(x_left) / (wp.epsilon * wp.kappa)
    w1, w2 = 0.5 * (1 - wp.gamma), 0.5 * (1 + wp.gamma)
    r1 = (i_vec[1] - i_vec[3]) / (2 * w1)
    r3 = (i_vec[1] + i_vec[3]) / (2 * w2)
    r2 = (i_vec[2] - i_vec[0]) / (2 * w1)
    r4 = (i_vec[2] + i_vec[0]) / (2 * w2)
    return np.array([r1, r2, r3, r4])
