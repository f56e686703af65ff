"""Walker-Preston efficiency benchmark: error against FFT cost.

Each (scheme, n_steps) cell propagates the Morse ground state over a
number of optical periods and records the 2-norm error at the final time
against a high-accuracy reference, together with the number of FFT
pairs spent.
"""
from __future__ import annotations

import configparser
import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ReferenceMismatch
from .krylov import KrylovConfig
from .model import MorseConfig, morse_ground_state, walker_preston
from .schemes import SCHEME_NAMES, StepStats, builtin_scheme, propagate
from .spectral import SpatialGrid

log = logging.getLogger(__name__)

CSV_COLUMNS = ("scheme", "n_steps", "tau", "fft_pairs", "error_l2", "wall_time_s")

#: per-exponential Krylov tolerances never go below this in benchmark cells
TOL_FLOOR = 1e-14


@dataclass(frozen=True)
class BenchConfig:
    x0: float = -0.8
    xN: float = 4.32
    n_points: int = 64
    morse: MorseConfig = MorseConfig()
    periods: float = 10.0
    schemes: tuple = SCHEME_NAMES
    steps: tuple = (100, 140, 200, 280, 400, 560, 800, 1120)
    # "relative": tol = target / (10 n_steps), floored; "fixed": tol as given
    krylov_policy: str = "relative"
    krylov_target: float = 1e-10
    krylov_tol: float = 1e-12
    krylov_m_max: int = 10
    reference_factor: int = 8
    reference_tol: float = 1e-16
    reference_m_max: int = 16
    reference_check: float = 1e-11
    output: str | None = None

    def __post_init__(self) -> None:
        if not (self.periods > 0 and self.n_points > 0):
            raise ConfigurationError("periods and n_points must be positive")
        if not self.steps or any(b <= a for a, b in zip(self.steps, self.steps[1:])):
            raise ConfigurationError("step counts must be strictly increasing")
        if self.steps[0] < 1:
            raise ConfigurationError("step counts must be positive")
        if self.krylov_policy not in ("relative", "fixed"):
            raise ConfigurationError(f"unknown Krylov policy {self.krylov_policy!r}")
        for name in self.schemes:
            if name not in SCHEME_NAMES:
                raise ConfigurationError(f"unknown scheme {name!r}")

    @property
    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.x0, self.xN, self.n_points)

    @property
    def t_final(self) -> float:
        return self.periods * self.morse.period

    def krylov_for(self, n_steps: int) -> KrylovConfig:
        if self.krylov_policy == "fixed":
            tol = self.krylov_tol
        else:
            tol = max(self.krylov_target / (10 * n_steps), TOL_FLOOR)
        return KrylovConfig(tol, self.krylov_m_max)


_HALF = MorseConfig(amplitude=0.011025 / 2, omega=0.01787 / 2)
# halving omega doubles the horizon; doubled step counts keep tau equal to the full-intensity run
_HALF_STEPS = tuple(2 * n for n in BenchConfig.steps)

PRESETS = {
    "walker-preston-64": BenchConfig(),
    "walker-preston-64-half": BenchConfig(morse=_HALF, steps=_HALF_STEPS),
    "walker-preston-128": BenchConfig(n_points=128),
    "walker-preston-128-half": BenchConfig(n_points=128, morse=_HALF, steps=_HALF_STEPS),
}


def preset(name: str) -> BenchConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(",", " ").split())


_KEYS = {
    # section, key -> (field, parser)
    ("grid", "x0"): ("x0", float),
    ("grid", "xN"): ("xN", float),
    ("grid", "n_points"): ("n_points", int),
    ("model", "depth"): ("depth", float),
    ("model", "alpha"): ("alpha", float),
    ("model", "mu"): ("mu", float),
    ("model", "amplitude"): ("amplitude", float),
    ("model", "omega"): ("omega", float),
    ("run", "periods"): ("periods", float),
    ("run", "schemes"): ("schemes", lambda s: tuple(s.replace(",", " ").split())),
    ("run", "steps"): ("steps", lambda s: tuple(int(v) for v in _floats(s))),
    ("run", "krylov_policy"): ("krylov_policy", str.strip),
    ("run", "krylov_target"): ("krylov_target", float),
    ("run", "krylov_tol"): ("krylov_tol", float),
    ("run", "krylov_m_max"): ("krylov_m_max", int),
    ("run", "reference_factor"): ("reference_factor", int),
    ("run", "reference_tol"): ("reference_tol", float),
    ("run", "reference_m_max"): ("reference_m_max", int),
    ("run", "reference_check"): ("reference_check", float),
    ("run", "output"): ("output", str.strip),
}

_MORSE_FIELDS = {"depth", "alpha", "mu", "amplitude", "omega"}


def load_config(path, base: BenchConfig | None = None) -> BenchConfig:
    """Read an INI-style file with ``[grid]``, ``[model]`` and ``[run]`` sections.

    Missing keys keep the values of ``base`` (the 64-point preset by default).
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    return config_from_mapping({s: dict(parser[s]) for s in parser.sections()}, base)


def config_from_mapping(sections: dict, base: BenchConfig | None = None) -> BenchConfig:
    cfg = PRESETS["walker-preston-64"] if base is None else base
    top, morse = {}, {}
    for section, entries in sections.items():
        for key, raw in entries.items():
            try:
                name, conv = _KEYS[(section, key)]
            except KeyError:
                raise ConfigurationError(f"unknown config key [{section}] {key}") from None
            try:
                value = conv(raw)
            except ValueError as exc:
                raise ConfigurationError(f"bad value for [{section}] {key}: {raw!r}") from exc
            (morse if name in _MORSE_FIELDS else top)[name] = value
    if morse:
        top["morse"] = replace(cfg.morse, **morse)
    return replace(cfg, **top)


@dataclass
class BenchRecord:
    scheme: str
    n_steps: int
    tau: float
    fft_pairs: int
    error_l2: float
    wall_time: float
    krylov_capped: int = field(default=0, compare=False)


def _setup(cfg: BenchConfig):
    grid = cfg.grid
    return walker_preston(cfg.morse, grid), morse_ground_state(cfg.morse, grid)


def compute_reference(cfg: BenchConfig, factor: int | None = None) -> np.ndarray:
    """High-accuracy final state, cross-checked by a second sixth-order scheme.

    Raises :class:`ReferenceMismatch` when the two disagree by more than
    ``cfg.reference_check``.
    """
    model, u0 = _setup(cfg)
    n_ref = (cfg.reference_factor if factor is None else factor) * cfg.steps[-1]
    kcfg = KrylovConfig(cfg.reference_tol, cfg.reference_m_max)
    ref, _ = propagate(builtin_scheme("cf6-3"), u0, 0.0, cfg.t_final, n_ref, model, kcfg)
    check, _ = propagate(builtin_scheme("cf6-2d"), u0, 0.0, cfg.t_final, n_ref, model, kcfg)
    gap = float(np.linalg.norm(ref - check))
    log.info("reference with %d steps; cross-check gap %.3e", n_ref, gap)
    if not gap <= cfg.reference_check:
        raise ReferenceMismatch(
            f"reference solutions disagree by {gap:.3e} (> {cfg.reference_check:.1e}) at {n_ref} steps"
        )
    return ref


def run_cell(cfg: BenchConfig, scheme_name: str, n_steps: int, ref: np.ndarray) -> BenchRecord:
    model, u0 = _setup(cfg)
    stats = StepStats()
    start = time.perf_counter()
    u, pairs = propagate(
        builtin_scheme(scheme_name), u0, 0.0, cfg.t_final, n_steps, model, cfg.krylov_for(n_steps), stats
    )
    elapsed = time.perf_counter() - start
    err = float(np.linalg.norm(u - ref))
    log.info("%-12s n=%-6d pairs=%-8d err=%.3e", scheme_name, n_steps, pairs, err)
    return BenchRecord(scheme_name, n_steps, cfg.t_final / n_steps, int(pairs), err, elapsed, stats.capped)


def run_benchmark(cfg: BenchConfig, ref: np.ndarray | None = None, jobs: int = 1) -> list:
    """All (scheme, n_steps) cells, ordered by scheme then step count."""
    if ref is None:
        ref = compute_reference(cfg)
    cells = [(s, n) for s in cfg.schemes for n in cfg.steps]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_cell, cfg, s, n, ref) for s, n in cells]
            return [f.result() for f in futures]
    return [run_cell(cfg, s, n, ref) for s, n in cells]


def format_csv(records) -> str:
    if not records:
        raise ConfigurationError("no records to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [r.scheme, r.n_steps, f"{r.tau:.12g}", r.fft_pairs, f"{r.error_l2:.9e}", f"{r.wall_time:.6f}"]
        )
    return buf.getvalue()


def emit_csv(records, path) -> None:
    text = format_csv(records)
    Path(path).write_text(text)


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigurationError(f"unexpected CSV header {reader.fieldnames}")
        return [
            BenchRecord(
                row["scheme"],
                int(row["n_steps"]),
                float(row["tau"]),
                int(row["fft_pairs"]),
                float(row["error_l2"]),
                float(row["wall_time_s"]),
            )
            for row in reader
        ]


def emit_table(records) -> str:
    if not records:
        raise ConfigurationError("no records to format")
    lines = [f"{'scheme':<12} {'n_steps':>8} {'tau':>10} {'fft_pairs':>10} {'error_l2':>12} {'time_s':>8}"]
    for r in records:
        lines.append(
            f"{r.scheme:<12} {r.n_steps:>8d} {r.tau:>10.4f} {r.fft_pairs:>10d} {r.error_l2:>12.4e} {r.wall_time:>8.2f}"
        )
    return "\n".join(lines)


def _select(records, scheme):
    rows = sorted((r for r in records if r.scheme == scheme), key=lambda r: r.n_steps)
    if not rows:
        raise ConfigurationError(f"no records for scheme {scheme!r}")
    return rows


def fit_order(records, scheme: str, n_min: int = 0, n_max: int | None = None) -> float:
    """Least-squares slope of log(error) against log(tau) over a step window."""
    rows = [
        r for r in _select(records, scheme) if r.n_steps >= n_min and (n_max is None or r.n_steps <= n_max)
    ]
    if len(rows) < 2:
        raise ConfigurationError("need at least two points to fit an order")
    tau = np.log([r.tau for r in rows])
    err = np.log([r.error_l2 for r in rows])
    return float(np.polyfit(tau, err, 1)[0])


def cost_at_error(records, scheme: str, target: float) -> float:
    """FFT-pair cost where the log-log error/cost polyline first reaches ``target``."""
    rows = _select(records, scheme)
    for a, b in zip(rows, rows[1:]):
        if a.error_l2 >= target >= b.error_l2:
            s = np.log(target / a.error_l2) / np.log(b.error_l2 / a.error_l2)
            return float(np.exp(np.log(a.fft_pairs) + s * np.log(b.fft_pairs / a.fft_pairs)))
    raise ConfigurationError(f"error {target:g} not bracketed by the {scheme!r} records")
