"""Run configuration: JSON parsing, defaults and validation."""

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .grid import GridSpec
from .pencil import CLOSURES, Thresholds

BACKENDS = ("auto", "dense", "shift_invert")
FORMATS = ("json", "csv")
INITS = ("kernel", "localized")


@dataclass(frozen=True)
class GridConfig:
    L: float = 40.0
    n: int = 2049


@dataclass(frozen=True)
class ParamsConfig:
    omega: tuple = (1e-2,)
    beta: tuple = (0.0,)


@dataclass(frozen=True)
class TolerancesConfig:
    eigen_residual: float = 1e-6
    localization: float = 0.99
    zero_tol: float = 1e-4
    threshold_band: float = 1e-2


@dataclass(frozen=True)
class SolverConfig:
    backend: str = "auto"
    window: tuple = (-1e-4, 1.02)
    max_modes: int = 0
    wave_closure: str = "right"


@dataclass(frozen=True)
class EvolutionConfig:
    dt_factor: float = 0.5
    duration: float = 50.0
    sample_dt: float = 0.1
    init: tuple = ("kernel", "localized")


@dataclass(frozen=True)
class ProbesConfig:
    virial_A: float = 10.0
    samples: int = 20
    lam: float = 0.7


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    params: ParamsConfig = field(default_factory=ParamsConfig)
    tolerances: TolerancesConfig = field(default_factory=TolerancesConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    probes: ProbesConfig = field(default_factory=ProbesConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def grid_spec(self):
        return GridSpec(self.grid.L, self.grid.n)

    @property
    def thresholds(self):
        t = self.tolerances
        return Thresholds(zero_tol=t.zero_tol, localization=t.localization,
                          threshold_band=t.threshold_band, eigen_residual=t.eigen_residual)

    def as_dict(self):
        return asdict(self)


SECTIONS = {"grid": GridConfig, "params": ParamsConfig, "tolerances": TolerancesConfig,
            "solver": SolverConfig, "evolution": EvolutionConfig, "probes": ProbesConfig,
            "output": OutputConfig}


class _Object(dict):
    duplicates = ()


def _collect_duplicates(pairs):
    out = _Object()
    dups = []
    for key, value in pairs:
        if key in out:
            dups.append(key)
        out[key] = value
    out.duplicates = tuple(dups)
    return out


def _first_duplicate(node, prefix=""):
    """Dotted path of the first repeated key, in document order."""
    if isinstance(node, _Object):
        if node.duplicates:
            return prefix + node.duplicates[0]
        for key, value in node.items():
            found = _first_duplicate(value, f"{prefix}{key}.")
            if found:
                return found
    elif isinstance(node, list):
        for i, value in enumerate(node):
            found = _first_duplicate(value, f"{prefix}{i}.")
            if found:
                return found
    return None


def _number(value, path, lo=None, hi=None, lo_open=True, hi_open=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {value!r}", path)
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"value {v} below the allowed range", path)
    if hi is not None and (v > hi or (hi_open and v == hi)):
        raise ConfigError(f"value {v} above the allowed range", path)
    return v


def _integer(value, path, lo):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if value < lo:
        raise ConfigError(f"value {value} below the minimum {lo}", path)
    return int(value)


def _list(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [value]
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list", path)
    return value


def _choice(value, path, options):
    if value not in options:
        raise ConfigError(f"{value!r} not one of {', '.join(options)}", path)
    return value


def _validate(name, raw):
    path = lambda k: f"{name}.{k}"
    if name == "grid":
        n = _integer(raw["n"], path("n"), 9)
        if n % 2 == 0:
            # refinement and the 1.5x widening both need an even number of cells
            raise ConfigError(f"n must be odd, got {n}", path("n"))
        return {"L": _number(raw["L"], path("L"), lo=0.0), "n": n}
    if name == "params":
        omega = tuple(_number(w, path("omega"), lo=0.0) for w in _list(raw["omega"], path("omega")))
        beta = []
        for b in _list(raw["beta"], path("beta")):
            b = _number(b, path("beta"))
            if not -1.0 < b < 1.0:
                raise ConfigError(f"beta outside (-1,1): {b}", path("beta"))
            beta.append(b)
        return {"omega": omega, "beta": tuple(beta)}
    if name == "tolerances":
        return {"eigen_residual": _number(raw["eigen_residual"], path("eigen_residual"), lo=0.0),
                "localization": _number(raw["localization"], path("localization"), 0.0, 1.0,
                                        hi_open=False),
                "zero_tol": _number(raw["zero_tol"], path("zero_tol"), 0.0, 1e-2),
                "threshold_band": _number(raw["threshold_band"], path("threshold_band"), 0.0, 0.5)}
    if name == "solver":
        win = raw["window"]
        if not isinstance(win, (list, tuple)) or len(win) != 2:
            raise ConfigError("expected [low, high]", path("window"))
        lo, hi = (_number(v, path("window")) for v in win)
        if not lo < hi:
            raise ConfigError(f"empty window [{lo}, {hi}]", path("window"))
        return {"backend": _choice(raw["backend"], path("backend"), BACKENDS),
                "window": (lo, hi), "max_modes": _integer(raw["max_modes"], path("max_modes"), 0),
                "wave_closure": _choice(raw["wave_closure"], path("wave_closure"), CLOSURES)}
    if name == "evolution":
        init = raw["init"]
        init = [init] if isinstance(init, str) else init
        if not isinstance(init, (list, tuple)) or not init:
            raise ConfigError("expected a non-empty list", path("init"))
        return {"dt_factor": _number(raw["dt_factor"], path("dt_factor"), 0.0, 0.5, hi_open=False),
                "duration": _number(raw["duration"], path("duration"), lo=0.0),
                "sample_dt": _number(raw["sample_dt"], path("sample_dt"), lo=0.0),
                "init": tuple(_choice(i, path("init"), INITS) for i in init)}
    if name == "probes":
        return {"virial_A": _number(raw["virial_A"], path("virial_A"), lo=1.0),
                "samples": _integer(raw["samples"], path("samples"), 1),
                "lam": _number(raw["lam"], path("lam"), lo=0.0)}
    if name == "output":
        if not isinstance(raw["directory"], str) or not raw["directory"]:
            raise ConfigError("expected a non-empty string", path("directory"))
        fmts = raw["formats"]
        if not isinstance(fmts, (list, tuple)) or not fmts:
            raise ConfigError("expected a non-empty list", path("formats"))
        return {"directory": raw["directory"],
                "formats": tuple(_choice(f, path("formats"), FORMATS) for f in fmts)}
    raise AssertionError(name)


def parse_config(data):
    """Validated RunConfig from JSON bytes or text; missing keys take defaults.

    ``omega`` and ``beta`` may also be given at the top level as a shorthand
    for the ``params`` section.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not UTF-8: {exc}", "") from None
    try:
        tree = json.loads(data, object_pairs_hook=_collect_duplicates) if data.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}", "") from None
    dup = _first_duplicate(tree)
    if dup:
        raise ConfigError(f"duplicate key {dup.rsplit('.', 1)[-1]!r}", dup)
    if not isinstance(tree, dict):
        raise ConfigError("top level must be an object", "")
    tree = dict(tree)
    for key in ("omega", "beta"):
        if key in tree:
            params = tree.setdefault("params", {})
            if not isinstance(params, dict):
                raise ConfigError("expected an object", "params")
            if key in params:
                raise ConfigError(f"{key} given both at top level and in params", f"params.{key}")
            params[key] = tree.pop(key)
    unknown = sorted(set(tree) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", unknown[0])
    sections = {}
    for name, cls in SECTIONS.items():
        raw = tree.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError("expected an object", name)
        defaults = asdict(cls())
        extra = sorted(set(raw) - set(defaults))
        if extra:
            raise ConfigError(f"unknown key {extra[0]!r}", f"{name}.{extra[0]}")
        merged = {k: _json_default(v) for k, v in defaults.items()}
        merged.update(raw)
        sections[name] = cls(**_validate(name, merged))
    return RunConfig(**sections)


def _json_default(v):
    return list(v) if isinstance(v, tuple) else v
