"""Time integration of the linearized flow and a windowed spectral diagnostic of its traces."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError
from .grid import trapezoid
from .operators import assemble_operator, discrete_soliton, discrete_translation_mode


class EvolutionBlowUp(RuntimeError):
    def __init__(self, time, growth):
        self.time, self.growth = time, growth
        super().__init__(f"norm grew by {growth:.3e} at s = {time:.4f}")


@dataclass
class FlowState:
    u1: np.ndarray
    u2: np.ndarray
    n_field: np.ndarray
    v_field: np.ndarray
    time: float = 0.0

    def stack(self):
        return np.array([self.u1, self.u2, self.n_field, self.v_field])

    @classmethod
    def from_stack(cls, x, time=0.0):
        return cls(x[0].copy(), x[1].copy(), x[2].copy(), x[3].copy(), time)

    def norm(self, g):
        return float(np.sqrt(sum(trapezoid(f * f, g) for f in self.stack())))


@dataclass
class ObservableTrace:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    dt: float
    duration: float
    norms: np.ndarray


class LinearFlow:
    """Right-hand side of the first-order system on one grid, with sponge layers."""

    def __init__(self, g, omega, beta, q=None, sponge=True, sponge_fraction=0.1, sponge_u=2.0):
        if not omega > 0:
            raise ConfigError(f"omega must be positive: {omega}", "params.omega")
        if not -1.0 < beta < 1.0:
            raise ConfigError(f"beta outside (-1,1): {beta}", "params.beta")
        self.g, self.omega, self.beta = g, float(omega), float(beta)
        self.q = discrete_soliton(g) if q is None else q
        self.lp = assemble_operator("Lplus", g, q=self.q).matrix
        self.lm = assemble_operator("Lminus", g, q=self.q).matrix
        n = g.n
        # central first difference with zero values beyond the ends
        self.dy = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="csr") / (2 * g.h)
        self.sigma = np.zeros((4, n))
        if sponge:
            width = sponge_fraction * g.L
            depth = np.clip((np.abs(g.y) - (g.L - width)) / width, 0.0, None) ** 2
            # transport at speed (1 +- beta)/sqrt(omega) needs a proportionally
            # stronger layer; the dispersive fields get a gentle one to limit reflection
            speed = (1.0 + abs(beta)) / np.sqrt(omega)
            self.sigma[:2] = sponge_u * depth
            self.sigma[2:] = 15.0 * speed / width * depth
        self.mask = np.ones(n)
        self.mask[[0, -1]] = 0.0

    def max_dt(self, factor=0.5):
        """RK4 step limit from the transport CFL number and the dispersive h^2 scale."""
        h = self.g.h
        return min(factor * np.sqrt(self.omega) * h, factor * h * h)

    def rhs(self, x):
        u1, u2, nf, vf = x
        so = np.sqrt(self.omega)
        lmu2 = self.lm @ u2
        du1 = lmu2 * self.mask
        du2 = (-(self.lp @ u1) + self.q * nf) * self.mask
        dn = (self.beta * (self.dy @ nf) - self.dy @ vf) / so - 2.0 * self.q * du1
        dv = (-(self.dy @ nf) + self.beta * (self.dy @ vf)) / so - 2.0 * self.beta * self.q * du1
        out = np.array([du1, du2, dn, dv])
        return out - self.sigma * x


def evolve(g, omega, beta, init, dt=None, duration=50.0, sample_dt=0.1, sponge=True,
           blowup=1e6, q=None, flow=None, dt_factor=0.5):
    """RK4 integration; returns the observable trace and the final state."""
    flow = flow or LinearFlow(g, omega, beta, q=q, sponge=sponge)
    limit = flow.max_dt(dt_factor)
    if dt is None:
        # an integer number of steps per sample keeps the trace uniformly spaced
        per = int(np.ceil(sample_dt / limit))
        dt = sample_dt / per
    elif dt > limit * (1 + 1e-12):
        raise ConfigError(f"dt = {dt:.3e} exceeds the stability limit {limit:.3e}", "evolution.dt")
    per = max(1, int(round(sample_dt / dt)))
    steps = int(round(duration / dt))
    x = init.stack().astype(float)
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial state is not finite", "evolution.init")
    w3 = flow.q**3
    n0 = max(init.norm(g), 1e-300)
    times, avals, bvals, norms = [0.0], [trapezoid(x[0] * w3, g)], [trapezoid(x[1] * w3, g)], [n0]
    for k in range(1, steps + 1):
        k1 = flow.rhs(x)
        k2 = flow.rhs(x + 0.5 * dt * k1)
        k3 = flow.rhs(x + 0.5 * dt * k2)
        k4 = flow.rhs(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % per == 0 or k == steps:
            nrm = float(np.sqrt(sum(trapezoid(f * f, g) for f in x)))
            if not np.isfinite(nrm) or (n0 > 1e-300 and nrm > blowup * n0):
                raise EvolutionBlowUp(k * dt, nrm / n0)
            if k % per == 0:
                times.append(k * dt)
                avals.append(trapezoid(x[0] * w3, g))
                bvals.append(trapezoid(x[1] * w3, g))
                norms.append(nrm)
    trace = ObservableTrace(np.array(times), np.array(avals), np.array(bvals), dt, steps * dt,
                            np.array(norms))
    return trace, FlowState.from_stack(x, steps * dt)


def kernel_state(g, a1=1.0, a2=1.0, q=None):
    """a1 times the discrete translation mode and a2 times the discrete soliton."""
    q = discrete_soliton(g) if q is None else q
    v, _ = discrete_translation_mode(g, q)
    z = np.zeros(g.n)
    return FlowState(a1 * v, a2 * q, z, z.copy())


def localized_state(g, q=None, seed=None):
    """Smooth localized data with no component along Q in u1 and along Q' in u2."""
    q = discrete_soliton(g) if q is None else q
    y = g.y
    rng = np.random.default_rng(seed)
    c = rng.uniform(0.5, 1.5, size=4) if seed is not None else np.array([1.0, 0.6, 0.8, 0.4])
    u1 = (c[0] + c[1] * y) * np.exp(-((y - 0.5) ** 2) / 2.0)
    u2 = (c[2] - c[3] * y * y) * np.exp(-((y + 0.3) ** 2) / 3.0)
    qp = np.gradient(q, g.h)
    u1 -= trapezoid(u1 * q, g) / trapezoid(q * q, g) * q
    u2 -= trapezoid(u2 * qp, g) / trapezoid(qp * qp, g) * qp
    u1[[0, -1]] = u2[[0, -1]] = 0.0
    z = np.zeros(g.n)
    return FlowState(u1, u2, z, z.copy())


@dataclass
class Peak:
    frequency: float
    amplitude: float
    persistence: float
    series: str
    persistent: bool


def _half_spectrum(t, x, pad=8):
    x = x - np.polyval(np.polyfit(t, x, 2), t)
    w = np.hanning(len(x))
    m = pad * len(x)
    spec = np.abs(np.fft.rfft(x * w, m)) * 2.0 / w.sum()
    freq = 2.0 * np.pi * np.fft.rfftfreq(m, d=t[1] - t[0])
    return freq, spec


def _peaks(freq, spec, floor):
    inner = (spec[1:-1] > spec[:-2]) & (spec[1:-1] >= spec[2:]) & (spec[1:-1] > floor)
    idx = np.nonzero(inner)[0] + 1
    return [(freq[i], spec[i]) for i in idx]


def mode_spectrum(trace, band=(1e-2, 1 - 1e-2), freq_tol=0.05, amp_tol=0.5, floor=1e-3):
    """Peaks of the windowed spectra of both observables over two half-windows.

    A peak persists when the other half has one within ``freq_tol`` relative
    frequency and ``amp_tol`` relative amplitude. Peaks below ``floor`` times
    the trace scale are ignored.
    """
    if trace.duration < 100.0 - 1e-9:
        raise ValueError(f"mode_spectrum needs duration >= 100, got {trace.duration}")
    t = trace.times
    half = len(t) // 2
    out = []
    for name, series in (("a", trace.a), ("b", trace.b)):
        scale = max(np.max(np.abs(series - np.mean(series))), 1e-300)
        f1, s1 = _half_spectrum(t[:half], series[:half])
        f2, s2 = _half_spectrum(t[half:2 * half], series[half:2 * half])
        p1 = _peaks(f1, s1, floor * scale)
        p2 = _peaks(f2, s2, floor * scale)
        for fr, amp in p1:
            if not band[0] < fr < band[1]:
                continue
            best = 0.0
            for fr2, amp2 in p2:
                if abs(fr2 - fr) <= freq_tol * fr and abs(amp2 - amp) <= amp_tol * amp:
                    best = max(best, min(amp, amp2) / max(amp, amp2))
            out.append(Peak(float(fr), float(amp), float(best), name, best > 0.0))
    return out


def oscillation_amplitude(trace, start, stop, series="a"):
    """Half the peak-to-peak range of an observable over start <= s < stop."""
    t = trace.times
    x = getattr(trace, series)[(t >= start - 1e-9) & (t < stop - 1e-9)]
    if x.size < 2:
        raise ValueError(f"window [{start}, {stop}) holds fewer than two samples")
    return 0.5 * float(np.ptp(x))


def radiation_decay(trace, window=10.0, series="a"):
    """Oscillation amplitude in the last window over that in the first."""
    early = oscillation_amplitude(trace, 0.0, window, series)
    late = oscillation_amplitude(trace, trace.duration - window, trace.duration + 1e-9, series)
    return late / early if early > 0 else float("inf")


def kernel_drift(trace):
    """Largest relative change of (a, b) over the trace."""
    a0, b0 = trace.a[0], trace.b[0]
    ref = max(np.hypot(a0, b0), 1e-300)
    return float(np.max(np.hypot(trace.a - a0, trace.b - b0)) / ref)
