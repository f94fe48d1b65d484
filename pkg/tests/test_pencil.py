import numpy as np
import pytest

from artifact.errors import ConfigError
from artifact.grid import GridSpec
from artifact.operators import assemble_operator, discrete_soliton, discrete_translation_mode
from artifact.pencil import (BLOCKS, SIN_BLOCKS, EigenResult, StateLayout, Thresholds,
                             analyze_point, assemble_pencil, block_swap, classify,
                             dense_eigenvalues, kernel_subspace, solve_pencil, sweep)

WINDOW = (-1e-4, 1.02)


@pytest.fixture(scope="module")
def coarse():
    return GridSpec(20.0, 257)


@pytest.fixture(scope="module")
def solved(coarse):
    p = assemble_pencil(coarse, omega=1e-2, beta=0.0)
    return p, solve_pencil(p, WINDOW)


def _residual(p, lam, x):
    return np.linalg.norm(p.K @ x - lam * (p.B @ x)) / np.linalg.norm(x)


@pytest.mark.parametrize("closure,wave", [("right", 16), ("one_sided", 17)])
def test_layout(closure, wave):
    lay = StateLayout(17, closure)
    assert lay.sizes == (15,) * 4 + (wave,) * 4
    assert lay.dim == 60 + 4 * wave
    rng = np.random.default_rng(3)
    x = rng.standard_normal(lay.dim)
    fields = lay.unpack(x)
    assert list(fields) == list(BLOCKS)
    assert np.array_equal(lay.pack(fields), x)
    assert fields["c1"][0] == fields["c1"][-1] == 0.0
    if closure == "right":
        assert fields["cv"][-1] == 0.0


def test_assembly_rejects_bad_input(coarse):
    for kwargs in ({"omega": 0.0}, {"beta": 1.0}, {"closure": "left"}, {"soliton": "exact"}):
        with pytest.raises(ConfigError):
            assemble_pencil(coarse, **kwargs)


def test_discrete_kernel_annihilated(coarse):
    p = assemble_pencil(coarse, omega=1e-2, beta=0.4)
    q = discrete_soliton(coarse)
    v, _ = discrete_translation_mode(coarse, q)
    for fields in ({"c1": v}, {"c2": q}):
        x = p.layout.pack(fields)
        assert np.linalg.norm(p.K @ x) / np.linalg.norm(x) <= 1e-9


def test_wave_rows_scale_with_sqrt_omega(coarse):
    a = assemble_pencil(coarse, omega=1e-2, beta=0.3)
    b = assemble_pencil(coarse, omega=4e-2, beta=0.3)
    assert abs(a.K - b.K).max() == 0.0
    waves = a.layout.indices(BLOCKS[4:])
    schr = a.layout.indices(BLOCKS[:4])
    assert abs(b.B[waves] - 2.0 * a.B[waves]).max() <= 1e-13
    assert abs(b.B[schr] - a.B[schr]).max() == 0.0


def test_kernel_multiplicity_two(solved):
    p, out = solved
    kernel = [r for r in out.results if abs(r.lambda_val) <= 1e-4]
    ks = kernel_subspace(p, kernel)
    assert ks["count"] == 2
    assert ks["angle"] <= 1e-2
    assert not out.failures


def test_sign_flip_symmetry(solved):
    p, out = solved
    flip = np.ones(p.layout.dim)
    flip[p.layout.indices(SIN_BLOCKS)] = -1.0
    for r in out.results:
        assert _residual(p, -r.lambda_val, flip * r.state) <= 1e-8
    lam = dense_eigenvalues(p)
    big = lam[np.abs(lam) > 1e-3]
    # every eigenvalue comes with its negative
    assert np.max(np.min(np.abs(big[:, None] + big[None, :]), axis=1)) <= 1e-8


def test_block_swap_at_zero_beta(solved):
    p, out = solved
    r = max(out.results, key=lambda r: r.lambda_val.real)
    assert r.lambda_val.real > 0.9
    assert _residual(p, -r.lambda_val, block_swap(p, r.state)) <= 1e-8
    assert _residual(p, r.lambda_val, block_swap(p, r.state)) > 1.0


def test_small_omega_reduces_to_schrodinger_product(coarse):
    # with the wave coupling negligible, lambda^2 runs over eig(L- L+)
    p = assemble_pencil(coarse, omega=1e-8, beta=0.0)
    lam = dense_eigenvalues(p)
    real = np.sort(lam.real[(np.abs(lam.imag) < 1e-6) & (lam.real > 1e-3)])
    real = real[np.concatenate([[True], np.diff(real) > 1e-5])]
    q = discrete_soliton(coarse)
    lp = assemble_operator("Lplus", coarse, q=q).interior_matrix().toarray()
    lm = assemble_operator("Lminus", coarse, q=q).interior_matrix().toarray()
    mu = np.sort(np.linalg.eigvals(lm @ lp).real)
    ref = np.sqrt(mu[2:6])
    assert np.max(np.abs(real[:4] - ref)) <= 1e-5


def test_dense_and_shift_invert_agree(coarse):
    p = assemble_pencil(coarse, omega=1e-2, beta=0.2)
    dense = solve_pencil(p, (0.9, 1.2), backend="dense")
    scan = solve_pencil(p, (0.9, 1.2), backend="shift_invert")
    a = np.sort([r.lambda_val.real for r in dense.results])
    b = np.sort([r.lambda_val.real for r in scan.results])
    assert len(a) == len(b) and len(a) > 0
    assert np.max(np.abs(a - b)) <= 1e-9


def test_unknown_backend(coarse):
    with pytest.raises(ConfigError):
        solve_pencil(assemble_pencil(coarse), WINDOW, backend="lobpcg")


def _fake(lam, loc=1.0, bamp=0.0, res=1e-12):
    return EigenResult(complex(lam), np.zeros(3), res, loc, bamp)


def test_classify_examples():
    th = Thresholds()
    assert classify(_fake(1e-6), th).tag == "kernel"
    assert classify(_fake(0.5), th).tag == "internal_candidate"
    assert classify(_fake(0.5), th).diagnostics["persistence"] == "not_checked"
    gone = classify(_fake(0.5), th, persistence=lambda r: (False, []))
    assert gone.tag == "continuum_artifact"
    assert classify(_fake(0.5), th, persistence=lambda r: (True, [])).tag == "internal_candidate"
    assert classify(_fake(0.5, loc=0.3), th).tag == "continuum_artifact"
    assert classify(_fake(0.5, bamp=1e-3), th).tag == "continuum_artifact"
    assert classify(_fake(1.005, loc=0.2), th).tag == "threshold_probe"
    assert classify(_fake(-0.995), th).tag == "threshold_probe"
    assert classify(_fake(1.5), th).tag == "continuum_artifact"
    with pytest.raises(ValueError):
        classify(_fake(0.5, res=1e-3), th)


def test_analyze_point_clean(coarse):
    rec = analyze_point(coarse, 1e-2, 0.3)
    assert rec.kernel_count == 2 and rec.internal_candidates == 0
    assert rec.red_flags == []
    for m in rec.modes:
        assert m["tag"] in ("kernel", "threshold_probe", "continuum_artifact")
        if m["tag"] != "kernel":
            assert len(m["orthogonality"]["direct"]) == 4


def test_analyze_point_fault_detected(coarse):
    rec = analyze_point(coarse, 1e-2, 0.3, soliton_scale=1.05)
    assert rec.kernel_count != 2
    assert any("kernel multiplicity" in f for f in rec.red_flags)


def test_sweep_sorted_deduplicated(coarse):
    seen = []
    rep = sweep([2e-2, 1e-2, 1e-2], [0.1], coarse, persistence=False,
                on_record=lambda recs: seen.append(len(recs)))
    assert [(r.omega, r.beta) for r in rep.records] == [(1e-2, 0.1), (2e-2, 0.1)]
    assert seen == [1, 2]
    with pytest.raises(ConfigError):
        sweep([1e-2], [1.2], coarse)
