"""Finite-difference Schrodinger-type operators around the soliton."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .grid import GridSpec, soliton_profiles, weighted_dot

KINDS = ("Lplus", "Lminus", "M", "S", "Sstar", "Msquared")
SECOND_ORDER = ("Lplus", "Lminus", "M")

# residual norms skip this many nodes at each end so that composed stencils
# never see a boundary row
INTERIOR_MARGIN = 4


@dataclass(frozen=True)
class BandedOperator:
    kind: str
    matrix: sp.csr_matrix
    bandwidth: int
    grid: GridSpec
    boundary_policy: str
    boundary_rows: tuple

    def interior_matrix(self):
        """Block acting on interior nodes with homogeneous Dirichlet data."""
        if self.boundary_policy != "dirichlet":
            raise ValueError(f"{self.kind} has no Dirichlet rows")
        k = len(self.boundary_rows) // 2
        n = self.grid.n
        return self.matrix[k:n - k, k:n - k].tocsr()


def _second_difference(n, h):
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="lil") / h**2


def first_difference(n, h):
    """Central first derivative with second-order one-sided end rows."""
    d = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil")
    d[0, :3] = [-3.0, 4.0, -1.0]
    d[n - 1, n - 3:] = [1.0, -4.0, 3.0]
    return (d / (2.0 * h)).tocsr()


def _dirichlet_rows(mat, rows):
    mat = mat.tolil()
    for r in rows:
        mat.rows[r] = [r]
        mat.data[r] = [1.0]
    return mat.tocsr()


def assemble_operator(kind, g, p=None, q=None):
    """Assemble one of KINDS on grid g.

    The potential uses ``q`` when given (e.g. a discrete soliton), otherwise
    the analytic profile from ``p``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")
    n, h, y = g.n, g.h, g.y
    if q is None:
        q = (p if p is not None else soliton_profiles(g)).q
    q2 = q * q
    if kind in SECOND_ORDER:
        pot = {"Lplus": 1.0 - 3.0 * q2, "Lminus": 1.0 - q2, "M": np.ones(n)}[kind]
        mat = -_second_difference(n, h) + sp.diags(pot)
        rows = (0, n - 1)
        return BandedOperator(kind, _dirichlet_rows(mat, rows), 1, g, "dirichlet", rows)
    if kind == "Msquared":
        c4 = np.array([1.0, -4.0, 6.0, -4.0, 1.0]) / h**4
        c2 = np.array([0.0, 1.0, -2.0, 1.0, 0.0]) / h**2
        c0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
        coef = c4 - 2.0 * c2 + c0
        mat = sp.diags([np.full(n - abs(k), coef[k + 2]) for k in range(-2, 3)],
                       list(range(-2, 3)), format="lil")
        rows = (0, 1, n - 2, n - 1)
        return BandedOperator(kind, _dirichlet_rows(mat, rows), 2, g, "dirichlet", rows)
    # S = d/dy - Q'/Q and S* = -d/dy - Q'/Q with Q'/Q = -tanh y
    d = first_difference(n, h)
    t = sp.diags(np.tanh(y))
    mat = d + t if kind == "S" else -d + t
    return BandedOperator(kind, mat.tocsr(), 1, g, "one_sided", (0, n - 1))


def apply(op, f):
    f = np.asarray(f)
    if f.shape != (op.grid.n,):
        raise ValueError(f"vector of length {f.shape[0]} does not match grid n={op.grid.n}")
    return op.matrix @ f


def interior_sup(r, margin=INTERIOR_MARGIN):
    return float(np.max(np.abs(r[margin:len(r) - margin])))


class OperatorSet:
    """All kinds assembled once on a grid, with composition helpers."""

    def __init__(self, g, p=None, q=None):
        self.grid = g
        self.p = p if p is not None else soliton_profiles(g)
        self.ops = {k: assemble_operator(k, g, self.p, q) for k in KINDS}

    def __getitem__(self, kind):
        return self.ops[kind]

    def __call__(self, *kinds_then_f):
        *kinds, f = kinds_then_f
        for k in reversed(kinds):
            f = apply(self.ops[k], f)
        return f


def check_factorization(f, ops):
    """Interior sup of S^2 L+ L- f - M^2 S^2 f."""
    lhs = ops("S", "S", "Lplus", "Lminus", f)
    rhs = ops("Msquared", "S", "S", f)
    return interior_sup(lhs - rhs)


def smooth_family(g):
    y = g.y
    p = soliton_profiles(g)
    return {"gaussian": np.exp(-y * y), "q": p.q, "yq": p.y_q}


def operator_identity_suite(g, p=None):
    """Interior sup residuals of the operator identities on grid g."""
    ops = OperatorSet(g, p)
    p = ops.p
    y = g.y
    gauss = np.exp(-y * y)
    sin_y = np.sin(y)
    report = {
        "Lminus_Q": interior_sup(ops("Lminus", p.q)),
        "Lplus_Qprime": interior_sup(ops("Lplus", p.q_prime)),
        "Lplus_LambdaQ_plus_Q": interior_sup(ops("Lplus", p.lambda_q) + p.q),
        "Lminus_yQ_plus_2Qprime": interior_sup(ops("Lminus", p.y_q) + 2.0 * p.q_prime),
        "Sstar2_h_plus_Q_2yQprime": interior_sup(
            ops("Sstar", "Sstar", p.h_aux) + p.q + 2.0 * y * p.q_prime),
        "S2_Qg_minus_Qg2": interior_sup(ops("S", "S", p.q * sin_y) + p.q * sin_y),
        "Lminus_minus_SstarS": interior_sup(ops("Lminus", gauss) - ops("Sstar", "S", gauss)),
    }
    for name, f in smooth_family(g).items():
        report[f"factorization_{name}"] = check_factorization(f, ops)
    report["S_adjoint"] = abs(
        weighted_dot(ops("S", p.q_prime), p.q, g) - weighted_dot(p.q_prime, ops("Sstar", p.q), g))
    return report


def convergence_ratios(g, p=None):
    """Residuals on g and on g.refined(), with their ratios."""
    coarse = operator_identity_suite(g, p)
    fine = operator_identity_suite(g.refined())
    out = {}
    for k in coarse:
        ratio = coarse[k] / fine[k] if fine[k] > 0 else float("inf")
        out[k] = {"coarse": coarse[k], "fine": fine[k], "ratio": ratio}
    return out


def discrete_soliton(g, tol=1e-13, maxiter=30):
    """Positive even solution of q'' - q + q^3 = 0 for the Dirichlet stencil.

    Returns the full-length vector (zero at the two end nodes).
    """
    m = g.n - 2
    y = g.y[g.interior]
    d2 = (_second_difference(m, g.h)).tocsr()
    q = np.sqrt(2.0) / np.cosh(y)
    # rounding in the 1/h^2 stencil sets a floor on the attainable residual
    tol = max(tol, 16.0 * np.finfo(float).eps / g.h**2)
    for _ in range(maxiter):
        res = d2 @ q - q + q**3
        if np.max(np.abs(res)) < tol:
            break
        jac = (d2 - sp.identity(m) + sp.diags(3.0 * q * q)).tocsc()
        dq = spl.spsolve(jac, -res)
        # the translation mode makes the Jacobian nearly singular; parity
        # projection removes that direction from each step
        dq = 0.5 * (dq + dq[::-1])
        q = q + dq
        q = 0.5 * (q + q[::-1])
    else:
        raise RuntimeError(f"discrete soliton Newton did not converge, residual {np.max(np.abs(res)):.2e}")
    out = np.zeros(g.n)
    out[g.interior] = q
    return out


def discrete_translation_mode(g, qh):
    """Odd near-null vector of the Dirichlet L+ built on qh, scaled like Q'."""
    lp = assemble_operator("Lplus", g, q=qh).interior_matrix()
    vals, vecs = spl.eigsh(lp.tocsc(), k=2, sigma=1e-3, which="LM")
    j = int(np.argmin(np.abs(vals)))
    v = np.zeros(g.n)
    v[g.interior] = vecs[:, j]
    qp = soliton_profiles(g).q_prime
    v *= weighted_dot(qp, qp, g) / weighted_dot(v, qp, g)
    return v, float(vals[j])
