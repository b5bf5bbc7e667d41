"""Seeded Monte Carlo experiments over a blocklength grid.

Every trial gets its own generator seeded from ``(seed, n, trial)``, so the
CSV is byte-identical whatever the number of worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from permchan.capacity import erasure_structure
from permchan.channel import Channel, Codeword, Histogram, channel_from_dict, load_channel, symmetric, transmit
from permchan.coding import (CodeConfig, MessageLattice, decode_erasure_symmetrized, decode_ml_lattice,
                             decode_permutation_channel, decode_threshold, encode_composition,
                             encode_randomized, permutation_of)
from permchan.errors import ConfigMismatch, ParameterOutOfRange, SchemeChannelMismatch
from permchan.matrix import build_profile
from permchan.oracle import analytic_error_bounds

SCHEMES = ("threshold", "ml", "permutation", "erasure_symmetrized")
WILSON_Z = 1.959963984540054
CSV_COLUMNS = ("n", "k", "message_count", "trials", "errors", "error_rate",
               "ci_low", "ci_high", "analytic_bound", "seed", "scheme")
SEED_ENV = "PERMCHAN_SEED"


@dataclass
class ExperimentConfig:
    channel: Channel
    scheme: str
    epsilon: float
    n_grid: list
    trials: int
    seed: int
    output: Path | None = None
    k: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterOutOfRange(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0.0 < self.epsilon < 0.5:
            raise ParameterOutOfRange(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.trials < 1:
            raise ParameterOutOfRange("trials must be at least 1")
        grid = [int(n) for n in self.n_grid]
        if not grid or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterOutOfRange(f"n_grid must be positive and strictly increasing, got {grid}")
        self.n_grid = grid

    @classmethod
    def from_dict(cls, d: dict, base: Path = Path("."), env=None):
        env = os.environ if env is None else env
        try:
            ch = d["channel"]
            channel = channel_from_dict(ch) if isinstance(ch, dict) else load_channel(base / ch)
            seed = int(env[SEED_ENV]) if env.get(SEED_ENV) else int(d["seed"])
            return cls(channel=channel, scheme=d["scheme"], epsilon=float(d["epsilon"]),
                       n_grid=list(d["n_grid"]), trials=int(d["trials"]), seed=seed,
                       output=base / d["output"] if d.get("output") else None,
                       k=d.get("k"), workers=int(d.get("workers", 1)))
        except KeyError as exc:
            raise ConfigMismatch(f"experiment config is missing field {exc}") from None

    @classmethod
    def from_file(cls, path, env=None):
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigMismatch(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(d, path.parent, env)


@dataclass(frozen=True)
class SimResult:
    n: int
    k: int
    message_count: int
    trials: int
    errors: int
    error_rate: float
    ci_low: float
    ci_high: float
    analytic_bound: float
    wall_time: float
    seed: int
    scheme: str

    @property
    def wilson_radius(self):
        return 0.5 * (self.ci_high - self.ci_low)


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z):
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return lo, hi


def trial_rng(seed: int, n: int, t: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, t]))


def erasure_layout(channel: Channel):
    """``(eta, column_map)`` sending each output column to its canonical index.

    Canonical order puts input ``x``'s clean output at ``x`` and the erasure
    last. Returns ``None`` if the channel has no erasure structure.
    """
    found = erasure_structure(channel)
    if found is None:
        return None
    eta, e = found
    col_map = np.argmax(channel.matrix, axis=0)
    col_map[e] = channel.input_size
    return eta, col_map


class _Scheme:
    """Bundle of code parameters and a one-trial function for a given ``n``."""

    def __init__(self, config: ExperimentConfig, n: int):
        ch = config.channel
        self.channel = ch
        self.n = n
        scheme = config.scheme
        if scheme == "permutation":
            if permutation_of(ch) is None:
                raise SchemeChannelMismatch("permutation scheme needs a permutation-matrix channel")
            self.lattice = MessageLattice(ch.input_size, n)
            self.k = n
            self.bound = 0.0
            self.run = self._permutation
            return
        if scheme == "erasure_symmetrized":
            layout = erasure_layout(ch)
            if layout is None:
                raise SchemeChannelMismatch("erasure_symmetrized scheme needs an erasure channel")
            eta, self.col_map = layout
            q = ch.input_size
            self.q = q
            profile = build_profile(symmetric(q, eta * (q - 1) / q))
            self.run = self._erasure
        else:
            profile = build_profile(ch)
            self.run = self._ml if scheme == "ml" else self._threshold
        support = tuple(range(1, ch.input_size + 1)) if scheme == "ml" else None
        self.code = CodeConfig(profile, n, config.epsilon, config.k, support)
        self.lattice = self.code.lattice
        self.k = self.code.k
        if config.k is not None and not self.code.k_is_default:
            self.bound = math.nan
        else:
            bounds = analytic_error_bounds(profile, n, config.epsilon)
            self.bound = bounds.rank2 if scheme == "ml" and bounds.rank2 is not None else bounds.general

    def _message(self, rng):
        return self.lattice[int(rng.integers(len(self.lattice)))]

    def _threshold(self, rng):
        msg = self._message(rng)
        y = transmit(self.channel, encode_randomized(msg, self.code, rng), rng)
        return decode_threshold(y, self.code, rng) != msg

    def _ml(self, rng):
        msg = self._message(rng)
        y = transmit(self.channel, encode_randomized(msg, self.code, rng), rng)
        return decode_ml_lattice(y, self.channel, self.code) != msg

    def _permutation(self, rng):
        msg = self._message(rng)
        x = encode_composition(Histogram(msg.numerators))
        y = transmit(self.channel, x, rng)
        return decode_permutation_channel(y, self.channel).as_tuple() != msg.numerators

    def _erasure(self, rng):
        msg = self._message(rng)
        y = transmit(self.channel, encode_randomized(msg, self.code, rng), rng)
        y = Codeword(self.col_map[y.symbols - 1] + 1, self.q + 1)
        return decode_erasure_symmetrized(y, self.q, self.code, rng) != msg


def _count_errors(scheme: _Scheme, seed: int, trials):
    return sum(bool(scheme.run(trial_rng(seed, scheme.n, t))) for t in trials)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list:
    """Simulate every blocklength in ``config.n_grid`` and return one result per ``n``."""
    workers = max(1, int(workers or config.workers))
    results = []
    for n in config.n_grid:
        start = time.perf_counter()
        scheme = _Scheme(config, n)
        chunks = [range(i, config.trials, workers) for i in range(workers)]
        if workers == 1:
            errors = _count_errors(scheme, config.seed, chunks[0])
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                errors = sum(pool.map(lambda c: _count_errors(scheme, config.seed, c), chunks))
        lo, hi = wilson_interval(errors, config.trials)
        results.append(SimResult(
            n=n, k=scheme.k, message_count=len(scheme.lattice), trials=config.trials,
            errors=errors, error_rate=errors / config.trials, ci_low=lo, ci_high=hi,
            analytic_bound=scheme.bound, wall_time=time.perf_counter() - start,
            seed=config.seed, scheme=config.scheme))
    return results


def format_csv(results) -> str:
    """Render results in grid order; floats use ``repr`` so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([repr(v) if isinstance(v, float) else v
                    for v in (getattr(r, c) for c in CSV_COLUMNS)])
    return buf.getvalue()


def write_csv(results, path):
    path = Path(path)
    path.write_text(format_csv(results))
    return path
