"""Eight-component generalized pencil K x = lambda B x, its solvers and mode classification."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sl
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .errors import ConfigError
from .grid import GridSpec, soliton_profiles
from .operators import assemble_operator, discrete_soliton
from .wave import WaveParams, matrix_A, orthogonality_from_edge, orthogonality_residuals

BLOCKS = ("c1", "s1", "c2", "s2", "cv", "sv", "cn", "sn")
COS_BLOCKS = ("c1", "c2", "cv", "cn")
SIN_BLOCKS = ("s1", "s2", "sv", "sn")
# equation rows whose K part acts on the cos family (the B part on the sin family)
COS_ROWS = (0, 3, 4, 6)
SIN_ROWS = (1, 2, 5, 7)
CLOSURES = ("right", "one_sided")


@dataclass(frozen=True)
class StateLayout:
    """Block ordering (c1, s1, c2, s2, cv, sv, cn, sn).

    The four Schrodinger blocks live on interior nodes. The wave blocks live on
    nodes 0..n-1 for the one-sided closure and on 0..n-2 for the right closure,
    where the value at y = +L is pinned to zero.
    """

    n: int
    closure: str = "right"

    @property
    def nodes(self):
        u = np.arange(1, self.n - 1)
        w = np.arange(self.n - 1) if self.closure == "right" else np.arange(self.n)
        return {b: (u if i < 4 else w) for i, b in enumerate(BLOCKS)}

    @property
    def sizes(self):
        return tuple(len(v) for v in self.nodes.values())

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.sizes)])

    @property
    def dim(self):
        return int(self.offsets[-1])

    def slice(self, name):
        i = BLOCKS.index(name)
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def indices(self, names):
        return np.concatenate([np.arange(self.slice(b).start, self.slice(b).stop) for b in names])

    def unpack(self, x):
        """Full-grid vectors per block, zero where a component is not an unknown."""
        out = {}
        for b, idx in self.nodes.items():
            v = np.zeros(self.n, dtype=x.dtype)
            v[idx] = x[self.slice(b)]
            out[b] = v
        return out

    def pack(self, fields):
        dtype = np.result_type(*[np.asarray(v).dtype for v in fields.values()], float)
        x = np.zeros(self.dim, dtype=dtype)
        for b, idx in self.nodes.items():
            if b in fields:
                x[self.slice(b)] = np.asarray(fields[b])[idx]
        return x

    def coordinates(self, g):
        return np.concatenate([g.y[idx] for idx in self.nodes.values()])


@dataclass(frozen=True)
class EigenPencil:
    K: sp.csr_matrix
    B: sp.csr_matrix
    layout: StateLayout
    grid: GridSpec
    omega: float
    beta: float
    q: np.ndarray


def _wave_derivative(n, h, closure):
    d = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil")
    d[0, :3] = [-3.0, 4.0, -1.0]
    d[n - 1, n - 3:] = [1.0, -4.0, 3.0]
    d = (d / (2.0 * h)).tocsr()
    if closure == "right":
        d = d[:n - 1, :n - 1]
    return d


def assemble_pencil(g, p=None, omega=1e-2, beta=0.0, closure="right", soliton="discrete", q=None):
    """Rows of the interior-mode system as a sparse pencil.

    Row blocks, in order:
      L- C2 - lam S1 = 0;  L+ S1 - Q SN - lam C2 = 0;
      L- S2 + lam C1 = 0;  L+ C1 - Q CN + lam S2 = 0;
      X' - lam sqrt(omega) (A X + kappa (-Q S1, Q C1, -gamma Q S1, gamma Q C1)) = 0.
    """
    if not omega > 0:
        raise ConfigError(f"omega must be positive: {omega}", "params.omega")
    if not -1.0 < beta < 1.0:
        raise ConfigError(f"beta outside (-1,1): {beta}", "params.beta")
    if closure not in CLOSURES:
        raise ConfigError(f"unknown wave closure {closure!r}", "solver.wave_closure")
    if q is None:
        if soliton == "discrete":
            q = discrete_soliton(g)
        elif soliton == "analytic":
            q = (p if p is not None else soliton_profiles(g)).q
        else:
            raise ConfigError(f"unknown soliton kind {soliton!r}", "solver.soliton")
    layout = StateLayout(g.n, closure)
    n = g.n
    m, nw = layout.sizes[0], layout.sizes[4]
    lp = assemble_operator("Lplus", g, q=q).interior_matrix()
    lm = assemble_operator("Lminus", g, q=q).interior_matrix()
    eye_n = sp.identity(n, format="csr")
    restrict = eye_n[1:n - 1, :nw]       # wave nodes -> interior nodes
    extend = eye_n[:nw, 1:n - 1]         # interior nodes -> wave nodes
    q_u = sp.diags(q[1:n - 1])
    i_m = sp.identity(m)
    dw = _wave_derivative(n, g.h, closure)

    gam = 2.0 * beta / (1.0 + beta**2)
    kap = 2.0 * (1.0 + beta**2) / (1.0 - beta**2)
    so = np.sqrt(omega)
    a = matrix_A(beta)
    q_w = sp.diags(q[:nw]) @ extend

    Z = None
    K = sp.bmat([
        [Z, Z, lm, Z, Z, Z, Z, Z],
        [Z, lp, Z, Z, Z, Z, Z, -q_u @ restrict],
        [Z, Z, Z, lm, Z, Z, Z, Z],
        [lp, Z, Z, Z, Z, Z, -q_u @ restrict, Z],
        [Z, Z, Z, Z, dw, Z, Z, Z],
        [Z, Z, Z, Z, Z, dw, Z, Z],
        [Z, Z, Z, Z, Z, Z, dw, Z],
        [Z, Z, Z, Z, Z, Z, Z, dw],
    ], format="csr")
    eye_w = sp.identity(nw)
    wave_a = [[so * a[r, c] * eye_w if a[r, c] != 0 else Z for c in range(4)] for r in range(4)]
    # coefficients of (c1, s1) in each wave row of the forcing
    src = [(0.0, -1.0), (1.0, 0.0), (0.0, -gam), (gam, 0.0)]
    wave_rows = []
    for r in range(4):
        c1c, s1c = src[r]
        fc = (so * kap * c1c) * q_w if c1c else Z
        fs = (so * kap * s1c) * q_w if s1c else Z
        wave_rows.append([fc, fs, Z, Z] + wave_a[r])
    B = sp.bmat([
        [Z, i_m, Z, Z, Z, Z, Z, Z],
        [Z, Z, i_m, Z, Z, Z, Z, Z],
        [-i_m, Z, Z, Z, Z, Z, Z, Z],
        [Z, Z, Z, -i_m, Z, Z, Z, Z],
    ] + wave_rows, format="csr")
    return EigenPencil(K, B, layout, g, float(omega), float(beta), q)


@dataclass
class EigenResult:
    lambda_val: complex
    state: np.ndarray
    residual: float
    localization: float
    boundary_amp: float


@dataclass(frozen=True)
class Thresholds:
    zero_tol: float = 1e-4
    localization: float = 0.99
    gap_margin: float = 1e-2
    boundary_tol: float = 1e-6
    threshold_band: float = 1e-2
    eigen_residual: float = 1e-6
    imag_tol: float = 1e-6
    persistence_tol: float = 1e-3


@dataclass
class ModeClass:
    tag: str
    diagnostics: dict = field(default_factory=dict)


def _family_indices(layout):
    rows_c = layout.indices([BLOCKS[i] for i in COS_ROWS])
    rows_s = layout.indices([BLOCKS[i] for i in SIN_ROWS])
    cols_c = layout.indices(COS_BLOCKS)
    cols_s = layout.indices(SIN_BLOCKS)
    return rows_c, rows_s, cols_c, cols_s


def reduced_matrix(pencil):
    """Dense N with N x_c = lambda^2 x_c, plus the map x_c -> lambda x_s.

    K maps each family to itself and B swaps them, so the sin unknowns can be
    eliminated exactly.
    """
    rows_c, rows_s, cols_c, cols_s = _family_indices(pencil.layout)
    K, B = pencil.K, pencil.B
    kc = K[rows_c][:, cols_c]
    ks = K[rows_s][:, cols_s]
    bcs = B[rows_c][:, cols_s].tocsc()
    bsc = B[rows_s][:, cols_c].tocsc()
    to_sin = spl.splu(bcs).solve(kc.toarray())
    n_red = spl.splu(bsc).solve(np.asarray(ks @ to_sin))
    return n_red, to_sin


def dense_eigenvalues(pencil):
    """All eigenvalues of the pencil from the reduced dense matrix."""
    n_red, _ = reduced_matrix(pencil)
    mu = sl.eigvals(n_red, overwrite_a=True, check_finite=False)
    lam = np.sqrt(mu.astype(complex))
    return np.concatenate([lam, -lam])


def eigen_metrics(pencil, lam, x):
    """Normalize x and compute residual, localization and boundary amplitude."""
    j = int(np.argmax(np.abs(x)))
    x = x * (abs(x[j]) / x[j]) / abs(x[j])
    if abs(lam.imag) <= 1e-12 * max(1.0, abs(lam)) and np.max(np.abs(x.imag)) < 1e-8:
        x = x.real.copy()
    K, B = pencil.K, pencil.B
    res = float(np.linalg.norm(K @ x - lam * (B @ x)) / np.linalg.norm(x))
    g = pencil.grid
    yy = pencil.layout.coordinates(g)
    w = np.abs(x) ** 2
    loc = float(w[np.abs(yy) <= g.L / 2].sum() / w.sum())
    off = pencil.layout.offsets
    edges = np.concatenate([[off[i], off[i + 1] - 1] for i in range(8)])
    bamp = float(np.max(np.abs(x[edges])))
    return EigenResult(complex(lam), x, res, loc, bamp)


class ShiftInvert:
    """Eigenpairs of the pencil nearest a shift, via ARPACK on (K - sigma B)^-1 B."""

    def __init__(self, pencil):
        self.pencil = pencil
        self._lu = {}

    def factor(self, sigma):
        key = complex(sigma)
        if key not in self._lu:
            dtype = float if key.imag == 0 else complex
            mat = (self.pencil.K - key.real * self.pencil.B if dtype is float
                   else self.pencil.K.astype(complex) - key * self.pencil.B)
            self._lu[key] = spl.splu(mat.tocsc())
        return self._lu[key]

    def nearest(self, sigma, k, tol=0.0, v0=None):
        lu = self.factor(sigma)
        B = self.pencil.B
        dim = B.shape[0]
        dtype = float if complex(sigma).imag == 0 else complex
        op = spl.LinearOperator((dim, dim), matvec=lambda v: lu.solve(np.asarray(B @ v, dtype=dtype)),
                                dtype=dtype)
        if v0 is None:
            v0 = np.random.default_rng(12345).standard_normal(dim)
        k = min(k, dim - 2)
        nu, vecs = spl.eigs(op, k=k, which="LM", tol=tol, v0=v0, ncv=min(dim, max(2 * k + 1, 20)))
        lam = sigma + 1.0 / nu
        return lam, vecs


def _cluster(values, tol):
    out = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if out and abs(v - out[-1][-1]) <= tol:
            out[-1].append(v)
        else:
            out.append([v])
    return out


@dataclass
class SolveOutput:
    results: list
    eigenvalues: np.ndarray
    failures: list


DENSE_LIMIT = 8192


def solve_pencil(pencil, window, max_modes=50, backend="auto", thresholds=Thresholds(),
                 eigenvalues=None):
    """Eigenpairs with Re(lambda) in window and |Im(lambda)| <= imag tolerance.

    Near-zero eigenvalues are square roots of rounding-level values of lambda^2,
    so inside the zero band the imaginary-part filter uses zero_tol instead.
    """
    lo, hi = window
    th = thresholds
    failures = []
    if backend == "auto":
        backend = "dense" if pencil.layout.dim <= DENSE_LIMIT else "shift_invert"
    if backend == "dense":
        lam = dense_eigenvalues(pencil) if eigenvalues is None else np.asarray(eigenvalues)
    elif backend == "shift_invert":
        lam, failures = _scan_window(pencil, window, th)
    else:
        raise ConfigError(f"unknown backend {backend!r}", "solver.backend")

    def keep(z):
        band = th.zero_tol if abs(z) <= th.zero_tol else th.imag_tol
        return lo <= z.real <= hi and abs(z.imag) <= band

    sel = [z for z in lam if keep(z)]
    zero = [z for z in sel if abs(z) <= th.zero_tol]
    rest = [z for z in sel if abs(z) > th.zero_tol and z.real >= 0]
    # negative members come from the sign flip of the sin family
    neg_needed = [z for z in sel if abs(z) > th.zero_tol and z.real < 0]

    si = ShiftInvert(pencil)
    results = []
    if zero:
        sigma = 10.0 * th.zero_tol
        try:
            ritz, vecs = si.nearest(sigma, len(zero))
            for z, v in zip(ritz, vecs.T):
                if abs(z) <= th.zero_tol and lo <= z.real <= hi:
                    results.append(eigen_metrics(pencil, z, v))
        except spl.ArpackNoConvergence as exc:
            failures.append({"shift": sigma, "error": f"no convergence: {exc}"})
    for group in _cluster(rest, 1e-6 * max(1.0, hi)):
        c = np.mean(group)
        sigma = c.real * (1.0 + 1e-7) + 1e-9
        try:
            ritz, vecs = si.nearest(sigma, len(group) + 2)
        except spl.ArpackNoConvergence as exc:
            failures.append({"shift": sigma, "error": f"no convergence: {exc}"})
            continue
        near = [j for j, z in enumerate(ritz) if abs(z - c) <= 1e-6 * max(1.0, abs(c))]
        basis = _real_basis(vecs[:, near])
        if basis.shape[1] < len(group):
            failures.append({"lambda": _cjson(c), "error":
                             f"eigenspace rank {basis.shape[1]} < multiplicity {len(group)}"})
        # a real degenerate eigenvalue: every vector of the span is an eigenvector
        for v in basis.T[:len(group)]:
            results.append(eigen_metrics(pencil, complex(c.real, 0.0), v))
    if neg_needed:
        flip = np.ones(pencil.layout.dim)
        flip[pencil.layout.indices(SIN_BLOCKS)] = -1.0
        for r in [r for r in results if abs(r.lambda_val) > th.zero_tol]:
            if lo <= -r.lambda_val.real <= hi:
                results.append(eigen_metrics(pencil, -r.lambda_val, flip * r.state))
    results.sort(key=lambda r: (r.lambda_val.real, r.lambda_val.imag))
    for r in results:
        if r.residual > th.eigen_residual:
            failures.append({"lambda": _cjson(r.lambda_val), "error": f"residual {r.residual:.3e}"})
    results = [r for r in results if r.residual <= th.eigen_residual]
    return SolveOutput(results[:max_modes] if max_modes else results, np.asarray(lam), failures)


def _real_basis(vecs, tol=1e-8):
    """Orthonormal real basis of the span of the real and imaginary parts."""
    if vecs.shape[1] == 0:
        return vecs.real
    u, sv, _ = np.linalg.svd(np.concatenate([vecs.real, vecs.imag], axis=1), full_matrices=False)
    return u[:, sv > tol * sv[0]]


def _cjson(z):
    return [float(np.real(z)), float(np.imag(z))]


def _scan_window(pencil, window, th, k=12, max_shifts=64):
    """Real shifts across the window until the covered disks span it."""
    lo, hi = window
    si = ShiftInvert(pencil)
    found, failures, covered = [], [], []
    todo = [0.5 * (lo + hi)]
    while todo and len(covered) + len(failures) < max_shifts:
        sigma = todo.pop(0)
        try:
            lam, _ = si.nearest(sigma, k)
        except spl.ArpackNoConvergence as exc:
            failures.append({"shift": sigma, "error": f"no convergence: {exc}"})
            continue
        radius = float(np.max(np.abs(lam - sigma)))
        covered.append((sigma - radius, sigma + radius))
        found.extend(lam)
        for edge in (sigma - radius, sigma + radius):
            if lo < edge < hi and not any(a < edge < b for a, b in covered):
                todo.append(edge)
    gaps = _uncovered(covered, lo, hi)
    if gaps:
        failures.append({"error": "window not covered", "gaps": gaps})
    uniq = []
    for z in found:
        if not any(abs(z - u) < 1e-9 * max(1.0, abs(z)) for u in uniq):
            uniq.append(z)
    return np.array(uniq, dtype=complex), failures


def _uncovered(intervals, lo, hi):
    gaps, x = [], lo
    for a, b in sorted(intervals):
        if a > x:
            gaps.append([x, min(a, hi)])
        x = max(x, b)
        if x >= hi:
            break
    if x < hi:
        gaps.append([x, hi])
    return gaps


def classify(res, thresholds=Thresholds(), persistence=None):
    """Tag an eigenpair; ``persistence`` re-checks a candidate on refined grids."""
    th = thresholds
    if res.residual > th.eigen_residual:
        raise ValueError(f"eigenpair residual {res.residual:.2e} above {th.eigen_residual:.0e}")
    lam = res.lambda_val
    a = abs(lam.real)
    diag = {"lambda": _cjson(lam), "localization": res.localization,
            "boundary_amp": res.boundary_amp, "residual": res.residual}
    if abs(lam) <= th.zero_tol and res.localization >= th.localization:
        return ModeClass("kernel", diag)
    in_gap = th.gap_margin < a < 1.0 - th.gap_margin and abs(lam.imag) <= th.imag_tol
    if in_gap and res.localization >= th.localization and res.boundary_amp <= th.boundary_tol:
        if persistence is None:
            diag["persistence"] = "not_checked"
            return ModeClass("internal_candidate", diag)
        ok, detail = persistence(res)
        diag["persistence"] = detail
        if ok:
            return ModeClass("internal_candidate", diag)
        diag["reason"] = "not persistent under refinement"
        return ModeClass("continuum_artifact", diag)
    if abs(a - 1.0) <= th.threshold_band:
        return ModeClass("threshold_probe", diag)
    return ModeClass("continuum_artifact", diag)


class PersistenceCheck:
    """Looks for a matching localized mode after L -> 1.5L and after n -> 2n - 1."""

    def __init__(self, g, omega, beta, thresholds=Thresholds(), closure="right"):
        self.variants = [g.widened(1.5), g.refined()]
        self.omega, self.beta = omega, beta
        self.th = thresholds
        self.closure = closure
        self._solvers = {}

    def _solver(self, gv):
        if gv not in self._solvers:
            self._solvers[gv] = ShiftInvert(assemble_pencil(gv, omega=self.omega, beta=self.beta,
                                                            closure=self.closure))
        return self._solvers[gv]

    def __call__(self, res):
        lam = res.lambda_val
        detail = []
        for gv in self.variants:
            si = self._solver(gv)
            ritz, vecs = si.nearest(lam.real, 6)
            best = None
            for z, v in zip(ritz, vecs.T):
                if abs(z - lam) > self.th.persistence_tol:
                    continue
                r = eigen_metrics(si.pencil, z, v)
                ok = (r.localization >= self.th.localization and r.boundary_amp <= self.th.boundary_tol
                      and abs(z.imag) <= self.th.imag_tol)
                if ok:
                    best = r
                    break
            detail.append({"L": gv.L, "n": gv.n,
                           "match": None if best is None else _cjson(best.lambda_val)})
            if best is None:
                return False, detail
        return True, detail


def kernel_subspace(pencil, results, rank_tol=1e-3):
    """Rank of span{(C1, C2)} over the kernel eigenvectors and its angle to span{(Q',0),(0,Q)}."""
    g = pencil.grid
    p = soliton_profiles(g)
    if not results:
        return {"count": 0, "raw": 0, "angle": None, "singular_values": []}
    cols = []
    for r in results:
        f = pencil.layout.unpack(r.state)
        cols.append(np.concatenate([f["c1"], f["c2"]]))
    mat = np.array(cols).T
    mat = np.concatenate([mat.real, mat.imag], axis=1)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    s = s / s[0]
    rank = int(np.sum(s > rank_tol))
    z = np.zeros(g.n)
    target = np.array([np.concatenate([p.q_prime, z]), np.concatenate([z, p.q])]).T
    angle = float(np.max(sl.subspace_angles(u[:, :max(rank, 1)], target))) if rank else None
    return {"count": rank, "raw": len(results), "angle": angle,
            "singular_values": [float(v) for v in s[:6]]}


def block_swap(pencil, x):
    """Map the (C1, S2, CN, SV) subsystem onto (S1, C2, SN, CV) and back; exact at beta = 0."""
    lay = pencil.layout
    y = np.zeros_like(x)
    for a, b in (("c1", "s1"), ("c2", "s2"), ("cv", "sv"), ("cn", "sn")):
        y[lay.slice(a)] = x[lay.slice(b)]
        y[lay.slice(b)] = x[lay.slice(a)]
    return y


@dataclass
class SweepRecord:
    omega: float
    beta: float
    kernel_count: int
    kernel_raw: int
    kernel_angle: float
    internal_candidates: int
    threshold_distance: float
    residual_max: float
    wall_time: float
    modes: list
    failures: list
    red_flags: list


def _orthogonality(pencil, r):
    f = pencil.layout.unpack(r.state)
    wp = WaveParams(pencil.beta, pencil.omega, float(r.lambda_val.real))
    c1, s1 = np.real(f["c1"]), np.real(f["s1"])
    direct = orthogonality_residuals(pencil.grid, wp, c1, s1, q=pencil.q)
    x_left = np.real([f["cv"][0], f["sv"][0], f["cn"][0], f["sn"][0]])
    return {"direct": [float(v) for v in direct],
            "from_edge": [float(v) for v in orthogonality_from_edge(pencil.grid, wp, x_left)]}


def analyze_point(g, omega, beta, thresholds=Thresholds(), backend="auto", closure="right",
                  window=None, persistence=True, max_modes=0, soliton_scale=1.0):
    """Solve, classify and summarize one (omega, beta) point.

    ``window`` defaults to (-zero_tol, 1.02); ``soliton_scale`` multiplies the
    discrete soliton in the potentials and exists to exercise failure paths.
    """
    t0 = time.perf_counter()
    th = thresholds
    window = (-th.zero_tol, 1.0 + 2e-2) if window is None else tuple(window)
    q = discrete_soliton(g) * soliton_scale
    pencil = assemble_pencil(g, omega=omega, beta=beta, closure=closure, q=q)
    out = solve_pencil(pencil, window, max_modes=max_modes, backend=backend, thresholds=th)
    checker = PersistenceCheck(g, omega, beta, th, closure) if persistence else None
    modes, kernel = [], []
    for r in out.results:
        mc = classify(r, th, checker)
        if mc.tag == "kernel":
            kernel.append(r)
        mode = {"lambda": _cjson(r.lambda_val), "tag": mc.tag,
                "localization": r.localization, "boundary_amp": r.boundary_amp,
                "residual": r.residual, "diagnostics": {k: v for k, v in mc.diagnostics.items()
                                                       if k in ("persistence", "reason")}}
        if abs(r.lambda_val) > th.zero_tol:
            mode["orthogonality"] = _orthogonality(pencil, r)
        modes.append(mode)
    ks = kernel_subspace(pencil, kernel)
    lam = out.eigenvalues
    real = lam[np.abs(lam.imag) <= th.imag_tol]
    real = real[real.real > 0]
    tdist = float(np.min(np.abs(real.real - 1.0))) if real.size else float("nan")
    cands = sum(m["tag"] == "internal_candidate" for m in modes)
    flags = []
    if cands:
        flags.append("internal_candidate found: theorem-violation report")
    if ks["count"] != 2:
        flags.append(f"kernel multiplicity {ks['count']} != 2")
    if out.failures:
        flags.append(f"{len(out.failures)} solver failures")
    return SweepRecord(
        omega=float(omega), beta=float(beta), kernel_count=ks["count"], kernel_raw=ks["raw"],
        kernel_angle=ks["angle"], internal_candidates=cands, threshold_distance=tdist,
        residual_max=max([r.residual for r in out.results], default=0.0),
        wall_time=time.perf_counter() - t0, modes=modes, failures=out.failures, red_flags=flags)


def _point_task(args):
    g, omega, beta, th, backend, closure, options = args
    try:
        return analyze_point(g, omega, beta, th, backend, closure, **options)
    except Exception as exc:  # a failed point is recorded, the sweep goes on
        return SweepRecord(float(omega), float(beta), 0, 0, None, 0, float("nan"), float("nan"),
                           0.0, [], [{"error": repr(exc)}], [f"point failed: {exc!r}"])


@dataclass
class SweepReport:
    records: list
    runtime: float
    thresholds: Thresholds
    grid: GridSpec


def sweep(omega_list, beta_list, g, thresholds=Thresholds(), backend="auto", closure="right",
          threads=1, on_record=None, **options):
    """analyze_point over the (omega, beta) product, sorted by (omega, beta).

    ``on_record`` is called with the list of records finished so far after
    each point, so callers can flush partial results.
    """
    t0 = time.perf_counter()
    for b in beta_list:
        if not -1.0 < b < 1.0:
            raise ConfigError(f"beta outside (-1,1): {b}", "params.beta")
    for w in omega_list:
        if not w > 0:
            raise ConfigError(f"omega must be positive: {w}", "params.omega")
    tasks = [(g, w, b, thresholds, backend, closure, options)
             for w, b in sorted({(float(w), float(b)) for w in omega_list for b in beta_list})]
    records = []

    def done(rec):
        records.append(rec)
        if on_record is not None:
            on_record(sorted(records, key=lambda r: (r.omega, r.beta)))

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for rec in ex.map(_point_task, tasks):
                done(rec)
    else:
        for t in tasks:
            done(_point_task(t))
    records.sort(key=lambda r: (r.omega, r.beta))
    return SweepReport(records, time.perf_counter() - t0, thresholds, g)
