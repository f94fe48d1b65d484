"""Numerical probes of the analytic estimates: transformed problem, coercivity, virial identities."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sl
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .grid import soliton_profiles, trapezoid
from .operators import OperatorSet, assemble_operator, interior_sup
from .wave import WaveParams, duhamel_solve


class ConstraintRankError(ValueError):
    """Constraint vectors are linearly dependent on the grid."""


def d1(f, g):
    return np.gradient(f, g.h, edge_order=2)


def d2(f, g):
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / g.h**2
    out[0], out[-1] = out[1], out[-2]
    return out


def forward_h1_sq(f, g):
    """Squared H1 norm with forward differences for f'."""
    df = np.diff(f) / g.h
    return float(g.h * np.sum(df * df) + trapezoid(f * f, g))


# -- transformed problem -------------------------------------------------

@dataclass
class TransformedPair:
    w2: np.ndarray
    z2: np.ndarray
    grid: object
    source: dict = field(default_factory=dict)


def transform(c2, s2, g, source=None):
    """W2 = S^2 C2 and Z2 = S^2 S2 with the S stencil."""
    s = assemble_operator("S", g).matrix
    return TransformedPair(s @ (s @ np.asarray(c2)), s @ (s @ np.asarray(s2)), g, source or {})


def transformed_residual(tp, lam, s_n, c_n, q=None, margin=4):
    """Interior sup of M^2 W2 - lam^2 W2 - lam Q SN'' and of the Z2 companion."""
    g = tp.grid
    q = soliton_profiles(g).q if q is None else q
    m2 = assemble_operator("Msquared", g).matrix
    f_w = lam * q * d2(np.asarray(s_n), g)
    f_z = -lam * q * d2(np.asarray(c_n), g)
    rw = m2 @ tp.w2 - lam**2 * tp.w2 - f_w
    rz = m2 @ tp.z2 - lam**2 * tp.z2 - f_z
    return interior_sup(rw, margin), interior_sup(rz, margin)


def transformed_forcing(bundle, method="closed"):
    """F_W = lam Q SN'' and F_Z = -lam Q CN''.

    ``closed`` eliminates the second derivatives with the wave equations, so
    only C1', S1' are differentiated numerically.
    """
    b = bundle
    g, q, lam = b.grid, b.q, b.lam
    if method == "fd":
        return lam * q * d2(b.sn, g), -lam * q * d2(b.cn, g)
    wp = b.wave_params
    e, be, gm, k = wp.epsilon, wp.beta, wp.gamma, wp.kappa
    qc, qs = q * b.c1, q * b.s1
    den = 1.0 - be * be
    f_w = lam * q * (e * k * gm * d1(qc, g)
                     + e * e * (-(2 * be * b.sv + (1 + be * be) * b.sn) / den**2
                                - k * (1 + be * gm) * qs / den))
    f_z = lam * q * (e * k * gm * d1(qs, g)
                     + e * e * ((2 * be * b.cv + (1 + be * be) * b.cn) / den**2
                                + k * (1 + be * gm) * qc / den))
    return f_w, f_z


# -- coercivity ----------------------------------------------------------

def coercivity_constant(kind, constraints, g, norm="h1", q=None, rank_tol=1e-10,
                        method="nullspace"):
    """Minimum of <L f, f> over the unit sphere of the chosen norm, with <f, c> = 0.

    Dirichlet data at +-L; ``norm`` is ``h1`` (forward differences) or ``l2``.
    ``nullspace`` solves the dense reduced problem on an orthonormal basis of
    the constraint complement; ``bordered`` runs shift-invert Lanczos on the
    sparse saddle-point system instead, which scales to fine grids.
    """
    if kind not in ("Lplus", "Lminus"):
        raise ValueError(f"coercivity is defined for Lplus or Lminus, not {kind!r}")
    op = assemble_operator(kind, g, q=q).interior_matrix() * g.h
    m = op.shape[0]
    if norm == "h1":
        gram = assemble_operator("M", g).interior_matrix() * g.h
    elif norm == "l2":
        gram = sps.identity(m, format="csr") * g.h
    else:
        raise ValueError(f"unknown norm {norm!r}")
    cmat = np.array([np.asarray(c)[g.interior] for c in constraints]) if constraints else None
    if cmat is not None:
        sv = np.linalg.svd(cmat, compute_uv=False)
        if sv[-1] <= rank_tol * sv[0]:
            raise ConstraintRankError(f"constraints have rank below {len(constraints)}: "
                                      f"singular values {sv}")
    if method == "nullspace":
        a, b = op.toarray(), gram.toarray()
        if cmat is not None:
            basis = sl.null_space(cmat)
            a, b = basis.T @ a @ basis, basis.T @ b @ basis
        return float(sl.eigh(a, b, eigvals_only=True, subset_by_index=[0, 0])[0])
    if method != "bordered":
        raise ValueError(f"unknown method {method!r}")
    # the potential is bounded below by -5, so this shift lies under the spectrum
    sigma = -6.0
    k = 0 if cmat is None else cmat.shape[0]
    shifted = (op - sigma * gram).tocsc()
    if k:
        c = sps.csc_matrix(cmat.T)
        shifted = sps.bmat([[shifted, c], [c.T, None]], format="csc")
    lu = spla.splu(shifted)

    def solve(v):
        rhs = np.concatenate([gram @ v, np.zeros(k)])
        return lu.solve(rhs)[:m]

    linop = spla.LinearOperator((m, m), matvec=solve, dtype=float)
    # no parity, so Lanczos sees both even and odd modes
    v0 = np.linspace(1.0, 2.0, m)
    nu = spla.eigs(linop, k=1, which="LR", v0=v0, tol=1e-13)[0]
    return float(sigma + 1.0 / nu[0].real)


# -- virial weights ------------------------------------------------------

def smoothstep9(t):
    """Degree-9 step with four vanishing derivatives at t = 0 and t = 1, and its derivatives."""
    t = np.clip(t, 0.0, 1.0)
    c = np.array([0, 0, 0, 0, 0, 126, -420, 540, -315, 70], dtype=float)
    p = np.polynomial.Polynomial(c)
    return [p(t)] + [p.deriv(k)(t) for k in range(1, 5)]


def chi_derivs(y):
    """chi and four derivatives at y: 1 on [0,1], 0 beyond 2, even."""
    a = np.abs(y)
    s = smoothstep9(a - 1.0)
    sgn = np.sign(y)
    out = [1.0 - s[0]]
    for k in range(1, 5):
        out.append(-s[k] * sgn**k)
    return out


@dataclass
class VirialWeights:
    A: float
    grid: object

    def __post_init__(self):
        if not self.A > 1:
            raise ValueError(f"cutoff scale must exceed 1, got {self.A}")

    def _u_derivs(self, y):
        # u = -(2/A) |y| (1 - chi), so zeta^2 = exp(u)
        c = chi_derivs(y)
        a, sgn = np.abs(y), np.sign(y)
        v = [a * (1 - c[0])]
        # derivatives of |y|(1-chi); odd orders carry the sign of y
        v.append(sgn * (1 - c[0]) - a * c[1])
        v.append(-2 * sgn * c[1] - a * c[2])
        v.append(-3 * sgn * c[2] - a * c[3])
        v.append(-4 * sgn * c[3] - a * c[4])
        return [-(2.0 / self.A) * x for x in v]

    def zeta2_derivs(self, y=None):
        """zeta_A^2 and its first four derivatives."""
        y = self.grid.y if y is None else np.asarray(y)
        u0, u1, u2, u3, u4 = self._u_derivs(y)
        e = np.exp(u0)
        return [e, e * u1, e * (u2 + u1**2), e * (u3 + 3 * u1 * u2 + u1**3),
                e * (u4 + 4 * u1 * u3 + 3 * u2**2 + 6 * u1**2 * u2 + u1**4)]

    @property
    def zeta(self):
        return np.sqrt(self.zeta2_derivs()[0])

    def phi(self, y=None):
        """Phi_A = int_0^y zeta_A^2, exact outside [1, 2] and Gauss-Legendre inside."""
        y = self.grid.y if y is None else np.asarray(y, dtype=float)
        a = np.abs(y)
        xg, wg = np.polynomial.legendre.leggauss(24)

        def partial(b):
            # int_1^b zeta^2 for 1 <= b <= 2
            b = np.atleast_1d(b)
            z = 1.0 + 0.5 * (b[:, None] - 1.0) * (xg[None, :] + 1.0)
            vals = self.zeta2_derivs(z.ravel())[0].reshape(z.shape)
            return 0.5 * (b - 1.0) * (vals @ wg)

        phi2 = 1.0 + partial(2.0)[0]
        out = np.where(a <= 1.0, a, 0.0)
        mid = (a > 1.0) & (a < 2.0)
        if np.any(mid):
            out[mid] = 1.0 + partial(a[mid])
        far = a >= 2.0
        out[far] = phi2 + 0.5 * self.A * (np.exp(-4.0 / self.A) - np.exp(-2.0 * a[far] / self.A))
        return np.sign(y) * out


def spectral_derivs(f, g, order=4):
    """Derivatives of f by FFT, treating [-L, L) as one period."""
    n = g.n - 1
    fh = np.fft.rfft(f[:n])
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=g.h)
    out = [np.asarray(f, float)]
    for p in range(1, order + 1):
        mult = (1j * k) ** p
        if n % 2 == 0 and p % 2:
            mult[-1] = 0.0
        d = np.fft.irfft(fh * mult, n)
        out.append(np.append(d, d[0]))
    return out


def trig_interp(f, g, x, order=4, chunk=512):
    """f and its derivatives at arbitrary points from the trigonometric interpolant."""
    n = g.n - 1
    c = np.fft.fft(np.asarray(f, float)[:n]) / n
    w = 2.0 * np.pi * np.fft.fftfreq(n, d=g.h)
    if n % 2 == 0:
        c[n // 2] = 0.0
    x = np.asarray(x, float)
    out = np.zeros((order + 1, x.size))
    for s in range(0, x.size, chunk):
        e = np.exp(1j * np.outer(x[s:s + chunk] + g.L, w))
        for p in range(order + 1):
            out[p, s:s + chunk] = (e @ (c * (1j * w) ** p)).real
    return out


def fd_derivs(f, g):
    """f and four derivatives with second-order central stencils (zero outside the grid)."""
    h = g.h
    f = np.asarray(f, float)
    pad = np.concatenate([np.zeros(2), f, np.zeros(2)])
    c = pad[2:-2]
    p1, m1, p2, m2 = pad[3:-1], pad[1:-3], pad[4:], pad[:-4]
    return [f, (p1 - m1) / (2 * h), (p1 - 2 * c + m1) / h**2,
            (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h**3), (p2 - 4 * p1 + 6 * c - 4 * m1 + m2) / h**4]


def piecewise_gauss(L, panel=0.25, order=12):
    """Composite Gauss-Legendre nodes and weights with breakpoints at +-1, +-2."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    brk = [-L, -2.0, -1.0, 1.0, 2.0, L]
    xs, ws = [], []
    for a, b in zip(brk[:-1], brk[1:]):
        m = max(1, int(np.ceil((b - a) / panel)))
        edges = np.linspace(a, b, m + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (hi - lo) * xg + 0.5 * (hi + lo))
            ws.append(0.5 * (hi - lo) * wg)
    return np.concatenate(xs), np.concatenate(ws)


def _virial_samples(f, vw, method):
    g = vw.grid
    if method == "spectral":
        x, w = piecewise_gauss(g.L)
        fd = trig_interp(f, g, x)
    elif method == "fd":
        # grid trapezoid; meant for data supported away from the cutoff layers
        x, w = g.y, np.full(g.n, g.h)
        w[[0, -1]] *= 0.5
        fd = fd_derivs(f, g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return x, w, fd


def virial_identity_probe(f, vw, method="spectral"):
    """Both sides of each weighted integration-by-parts identity, with residuals.

    ``spectral`` evaluates f and its derivatives from the trigonometric
    interpolant at Gauss-Legendre nodes on the pieces where the weights are
    smooth; ``fd`` uses central differences and the grid trapezoid.
    """
    x, wq, (f0, f1, f2, f3, f4) = _virial_samples(f, vw, method)
    z = vw.zeta2_derivs(x)
    phi = vw.phi(x)
    q = np.sqrt(2.0) / np.cosh(x)
    qp = -q * np.tanh(x)
    ip = lambda a: float(np.dot(wq, a))
    sym = 2.0 * phi * f1 + z[0] * f0
    rows = [
        ("fourth_times_phi_fprime", ip(f4 * phi * f1),
         1.5 * ip(z[0] * f2**2) - 0.5 * ip(z[2] * f1**2)),
        ("second_times_phi_fprime", ip(f2 * phi * f1), -0.5 * ip(z[0] * f1**2)),
        ("f_times_phi_fprime", ip(f0 * phi * f1), -0.5 * ip(z[0] * f0**2)),
        ("potential_times_phi_fprime", ip((4 * q * q * f2 + 4 * qp * q * f1) * phi * f1),
         -2.0 * ip(q * q * z[0] * f1**2)),
        ("fourth_times_symmetric_multiplier", ip(f4 * sym),
         4.0 * ip(z[0] * f2**2) - 3.0 * ip(z[2] * f1**2) + 0.5 * ip(z[4] * f0**2)),
        ("second_times_symmetric_multiplier", ip(f2 * sym),
         -2.0 * ip(z[0] * f1**2) + 0.5 * ip(z[2] * f0**2)),
        ("f_times_symmetric_multiplier", ip(f0 * sym), 0.0),
    ]
    return [{"name": n, "lhs": a, "rhs": b, "residual": abs(a - b)} for n, a, b in rows]


def pohozaev_gap(f, vw):
    """Distance of the weighted quadratic terms from their unweighted limit forms."""
    x, wq, (f0, f1, f2, _, _) = _virial_samples(f, vw, "spectral")
    z = vw.zeta2_derivs(x)
    q2 = 2.0 / np.cosh(x) ** 2
    ip = lambda a: float(np.dot(wq, a))
    terms = [
        (1.5 * ip(z[0] * f2**2), 1.5 * ip(f2**2)),
        (ip((z[0] - 2 * z[0] * q2 - 0.5 * z[2]) * f1**2), ip((1 - 2 * q2) * f1**2)),
        (ip(z[0] * f0**2), ip(f0**2)),
    ]
    return max(abs(a - b) for a, b in terms)


# -- probe records -------------------------------------------------------

@dataclass
class ProbeRecord:
    name: str
    lhs: float
    rhs: float
    constant: float = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.constant is None:
            self.constant = self.lhs / self.rhs if self.rhs > 0 else None

    def as_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "constant": self.constant, "params": self.params}


def lemma_h_probe(w, g, h_aux=None):
    """int Q^(1/2) w^2 against (int h w)^2 + int w'^2."""
    p = soliton_profiles(g)
    h_aux = p.h_aux if h_aux is None else h_aux
    w = np.asarray(w, float)
    lhs = trapezoid(np.sqrt(p.q) * w * w, g)
    dw = np.diff(w) / g.h
    rhs = trapezoid(h_aux * w, g) ** 2 + float(g.h * np.sum(dw * dw))
    return ProbeRecord("h_weighted_coercivity", lhs, rhs, params={"L": g.L, "n": g.n})


@dataclass
class DataBundle:
    """Blocks of a (possibly manufactured) solution on one grid."""

    grid: object
    lam: float
    omega: float
    beta: float
    q: np.ndarray
    c1: np.ndarray
    s1: np.ndarray
    c2: np.ndarray
    s2: np.ndarray
    cv: np.ndarray
    sv: np.ndarray
    cn: np.ndarray
    sn: np.ndarray

    @property
    def wave_params(self):
        return WaveParams(self.beta, self.omega, self.lam)

    @property
    def epsilon(self):
        return self.lam * np.sqrt(self.omega)


def bundle_from_eigenpair(pencil, res):
    f = {k: np.real(v) for k, v in pencil.layout.unpack(res.state).items()}
    return DataBundle(pencil.grid, float(res.lambda_val.real), pencil.omega, pencil.beta,
                      pencil.q, **f)


def manufactured_bundle(g, omega, beta, lam, c1, s1, c2=None, s2=None, q=None):
    """Arbitrary (C1, S1, C2, S2) with wave blocks from the decaying Duhamel solve."""
    q = soliton_profiles(g).q if q is None else q
    z = np.zeros(g.n)
    ws = duhamel_solve(g, WaveParams(beta, omega, lam), c1, s1, q=q)
    return DataBundle(g, float(lam), float(omega), float(beta), q, np.asarray(c1, float),
                      np.asarray(s1, float), z if c2 is None else np.asarray(c2, float),
                      z if s2 is None else np.asarray(s2, float), ws.c_v, ws.s_v, ws.c_n, ws.s_n)


def psi_ratio(y, epsilon, beta):
    """|Psi - 2 eps^2 (2yQ' + Q)/(1-beta^2)| / ((1 + |y|^3) Q), using Psi/Q in closed form."""
    a, b = epsilon / (1 + beta), epsilon / (1 - beta)
    t = np.tanh(y)
    psi_q = (-2 * epsilon * t * (np.sin(a * y) + np.sin(b * y))
             + epsilon**2 * (np.cos(a * y) / (1 + beta) + np.cos(b * y) / (1 - beta)))
    lead = 2 * epsilon**2 / (1 - beta**2) * (1 - 2 * y * t)
    return np.abs(psi_q - lead) / (1 + np.abs(y) ** 3)


def psi_profile(g, epsilon, beta, method="closed"):
    """Psi = L-( (1+b) cos(eps y/(1+b)) Q + (1-b) cos(eps y/(1-b)) Q )."""
    p = soliton_profiles(g)
    y = g.y
    a, b = epsilon / (1 + beta), epsilon / (1 - beta)
    if method == "operator":
        u = ((1 + beta) * np.cos(a * y) + (1 - beta) * np.cos(b * y)) * p.q
        return assemble_operator("Lminus", g).matrix @ u
    return (2 * epsilon * p.q_prime * (np.sin(a * y) + np.sin(b * y))
            + epsilon**2 * p.q * (np.cos(a * y) / (1 + beta) + np.cos(b * y) / (1 - beta)))


def _weighted(b, w, f):
    return trapezoid(w * f * f, b.grid)


def _probe_terms(b):
    g = b.grid
    p = soliton_profiles(g)
    q = p.q
    e, lam = b.epsilon, b.lam
    ip = lambda u, v: trapezoid(u * v, g)
    qs1, qc1 = _weighted(b, q, b.s1), _weighted(b, q, b.c1)
    qs2, qc2 = _weighted(b, q, b.s2), _weighted(b, q, b.c2)
    inv = 1.0 / lam if lam != 0 else np.inf
    vir = 2 * g.y * p.q_prime + q
    tp = transform(b.c2, b.s2, g)
    sq = np.sqrt(q)
    w2, z2 = _weighted(b, sq, tp.w2), _weighted(b, sq, tp.z2)
    w2p, z2p = _weighted(b, sq, d1(tp.w2, g)), _weighted(b, sq, d1(tp.z2, g))

    def safe(x, y):
        return 0.0 if x == 0 else x * y

    return {
        "c2_lambdaq_vs_sn": (abs(ip(b.c2, p.lambda_q)), safe(np.sqrt(_weighted(b, q, b.sn)), inv)),
        "s2_lambdaq_vs_cn": (abs(ip(b.s2, p.lambda_q)), safe(np.sqrt(_weighted(b, q, b.cn)), inv)),
        "wave_sup_vs_forcing": (
            float(np.max(np.abs(b.cv) + np.abs(b.sv) + np.abs(b.cn) + np.abs(b.sn))),
            e * trapezoid(q * (np.abs(b.s1) + np.abs(b.c1)), g)),
        "wave_weighted_l2": (
            sum(_weighted(b, q, v) for v in (b.cv, b.sv, b.cn, b.sn)), e * e * (qs1 + qc1)),
        "lambdaq_pairings": (abs(ip(b.c2, p.lambda_q)) + abs(ip(b.s2, p.lambda_q)),
                             safe(e * np.sqrt(qs1 + qc1), inv)),
        "s2_virial_orthogonality": (abs(ip(vir, b.s2)), e * lam * np.sqrt(qs1) + e * e * np.sqrt(qs2)),
        "c2_virial_orthogonality": (abs(ip(vir, b.c2)), e * lam * np.sqrt(qc1) + e * e * np.sqrt(qc2)),
        "q_pairings": (abs(ip(b.s2, q)) + abs(ip(b.c2, q)),
                       safe(e * np.sqrt(qs1 + qc1), lam + inv) + e * e * np.sqrt(qs2)),
        "c2_qprime": (abs(ip(b.c2, p.q_prime)), e * lam * np.sqrt(qc1) + e * e * np.sqrt(qc2)),
        "s2_qprime": (abs(ip(b.s2, p.q_prime)), e * lam * np.sqrt(qs1) + e * e * np.sqrt(qs2)),
        "psi_expansion": (float(np.max(psi_ratio(g.y, e, b.beta))), e**4),
        "c2_weighted_by_w2": (qc2, w2 + e * e * (qc1 + qs1)),
        "s2_weighted_by_z2": (qs2, z2 + e * e * (qc1 + qs1)),
        "first_blocks_by_transformed": (qc1 + qs1, w2 + z2),
        "second_blocks_h2_by_transformed": (
            sum(_weighted(b, q, v) for v in (b.c2, d1(b.c2, g), d2(b.c2, g),
                                             b.s2, d1(b.s2, g), d2(b.s2, g))), w2 + z2),
        "first_blocks_derivative_by_transformed": (
            _weighted(b, q, d1(b.c1, g)) + _weighted(b, q, d1(b.s1, g)), w2p + z2p + w2 + z2),
    }


PROBE_NAMES = (
    "c2_lambdaq_vs_sn", "s2_lambdaq_vs_cn", "wave_sup_vs_forcing", "wave_weighted_l2",
    "lambdaq_pairings", "s2_virial_orthogonality", "c2_virial_orthogonality", "q_pairings",
    "c2_qprime", "s2_qprime", "psi_expansion", "c2_weighted_by_w2", "s2_weighted_by_z2",
    "first_blocks_by_transformed", "second_blocks_h2_by_transformed",
    "first_blocks_derivative_by_transformed")


def inequality_probe(name, bundle):
    """LHS and RHS of a named estimate evaluated on the bundle."""
    if name not in PROBE_NAMES:
        raise KeyError(f"unknown probe {name!r}; known: {', '.join(PROBE_NAMES)}")
    lhs, rhs = _probe_terms(bundle)[name]
    return ProbeRecord(name, float(lhs), float(rhs),
                       params={"omega": bundle.omega, "beta": bundle.beta, "lambda": bundle.lam,
                               "L": bundle.grid.L, "n": bundle.grid.n})


def all_probes(bundle):
    terms = _probe_terms(bundle)
    return [ProbeRecord(k, float(a), float(r),
                        params={"omega": bundle.omega, "beta": bundle.beta, "lambda": bundle.lam})
            for k, (a, r) in terms.items()]


def aggregates(bundle):
    """G = int(lam^2 S2^2 + lam^2 C2^2 + S2''^2 + C2''^2) and H = sum of squared H1 norms."""
    b, g = bundle, bundle.grid
    ip = lambda f: trapezoid(f * f, g)
    big_g = b.lam**2 * (ip(b.s2) + ip(b.c2)) + ip(d2(b.s2, g)) + ip(d2(b.c2, g))
    big_h = sum(forward_h1_sq(v, g) for v in (b.s1, b.c1, b.s2, b.c2))
    return {"G": float(big_g), "H": float(big_h)}


def resonance_check(g, p=None):
    """Interior residuals of L-(1) - (1 - Q^2) and L+(1 - Q^2) - 1."""
    ops = OperatorSet(g, p)
    one = np.ones(g.n)
    q2 = ops.p.q_squared
    return (interior_sup(ops("Lminus", one) - (1.0 - q2)),
            interior_sup(ops("Lplus", 1.0 - q2) - 1.0))


def resonance_state(pencil):
    """Threshold resonance data S1 = 1 - Q^2, C2 = 1 as a pencil vector."""
    q2 = pencil.q**2
    return pencil.layout.pack({"s1": 1.0 - q2, "c2": np.ones(pencil.grid.n)})
