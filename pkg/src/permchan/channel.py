"""Discrete memoryless channels, codewords, types, and the permutation channel.

Alphabets are 1-based: a channel with ``q`` inputs accepts symbols ``1..q``.
For erasure channels the erasure symbol is the last output index ``q + 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from permchan import kernels
from permchan.errors import (AlphabetMismatch, DegenerateShape, NegativeEntry,
                             ParameterOutOfRange, RowSumMismatch)

ROW_SUM_TOL = 1e-12

DMC_THEN_PERMUTE = "dmc_then_permute"
PERMUTE_THEN_DMC = "permute_then_dmc"


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic transition matrix; ``matrix[x - 1, y - 1] = P(y|x)``."""

    matrix: np.ndarray
    labels: dict | None = field(default=None, compare=False)

    @property
    def input_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def rows(self):
        return [list(r) for r in self.matrix]

    def __eq__(self, other):
        return isinstance(other, Channel) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __repr__(self):
        return f"Channel({self.input_size}x{self.output_size}, rows={self.matrix.tolist()})"

    def to_dict(self):
        d = {"input_size": self.input_size, "output_size": self.output_size,
             "rows": self.matrix.tolist()}
        if self.labels:
            d["labels"] = self.labels
        return d


@dataclass(frozen=True, eq=False)
class Codeword:
    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        s = np.array(self.symbols, dtype=np.int64).reshape(-1)
        if s.size == 0:
            raise ParameterOutOfRange("codeword must have length n >= 1")
        if self.alphabet_size < 1 or s.min() < 1 or s.max() > self.alphabet_size:
            raise AlphabetMismatch(
                f"symbols must lie in 1..{self.alphabet_size}, got {s.min()}..{s.max()}")
        s.setflags(write=False)
        object.__setattr__(self, "symbols", s)

    @property
    def n(self) -> int:
        return self.symbols.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return (isinstance(other, Codeword) and self.alphabet_size == other.alphabet_size
                and np.array_equal(self.symbols, other.symbols))

    def __hash__(self):
        return hash((self.alphabet_size, self.symbols.tobytes()))

    def __repr__(self):
        return f"Codeword({tuple(self.symbols.tolist())}, q={self.alphabet_size})"

    def _zero_based(self):
        return np.ascontiguousarray(self.symbols - 1)


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64).reshape(-1)
        if c.size == 0 or (c < 0).any():
            raise ParameterOutOfRange("histogram counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def alphabet_size(self) -> int:
        return self.counts.shape[0]

    def as_tuple(self):
        return tuple(int(c) for c in self.counts)

    def probabilities(self):
        return self.counts / self.n

    def log_multinomial(self):
        """Natural log of n! / prod(counts!)."""
        return math.lgamma(self.n + 1) - sum(math.lgamma(c + 1) for c in self.as_tuple())

    def multinomial(self):
        """Exact multinomial coefficient as a Python integer."""
        out = math.factorial(self.n)
        for c in self.as_tuple():
            out //= math.factorial(c)
        return out

    def __eq__(self, other):
        return isinstance(other, Histogram) and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"Histogram{self.as_tuple()}"


@dataclass(frozen=True, eq=False)
class DistVector:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64).reshape(-1)
        if p.size == 0 or (p < -ROW_SUM_TOL).any():
            raise NegativeEntry(0, int(np.argmin(p)) if p.size else 0,
                                float(p.min()) if p.size else float("nan"))
        dev = p.sum() - 1.0
        if abs(dev) > ROW_SUM_TOL:
            raise RowSumMismatch(0, dev)
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.shape[0]

    def __repr__(self):
        return f"DistVector({self.probs.tolist()})"


def _to_float(v):
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    return float(v)


def validate_channel(matrix, *, min_size: int = 2, labels=None) -> Channel:
    """Check stochasticity of ``matrix`` and wrap it as a :class:`Channel`.

    Entries within 1e-12 of 0 or 1 are clamped, and rows whose sum is within
    1e-12 of one are renormalised. Strings such as ``"0.1"`` or ``"1/3"`` are
    parsed exactly before conversion to float.
    """
    try:
        rows = [[_to_float(v) for v in row] for row in matrix]
    except TypeError:
        raise DegenerateShape("channel matrix must be a 2-D array") from None
    if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
        raise DegenerateShape("channel matrix must be non-empty and rectangular")
    a = np.array(rows, dtype=np.float64)
    if a.shape[0] < min_size or a.shape[1] < min_size:
        raise DegenerateShape(
            f"need at least {min_size} inputs and outputs, got {a.shape[0]}x{a.shape[1]}")
    if not np.isfinite(a).all():
        raise DegenerateShape("channel entries must be finite")
    bad = np.argwhere(a < -ROW_SUM_TOL)
    if bad.size:
        i, j = bad[0]
        raise NegativeEntry(int(i), int(j), float(a[i, j]))
    a = np.clip(a, 0.0, None)
    dev = a.sum(axis=1) - 1.0
    worst = np.flatnonzero(np.abs(dev) > ROW_SUM_TOL)
    if worst.size:
        i = int(worst[0])
        raise RowSumMismatch(i, float(dev[i]))
    a = a / a.sum(axis=1, keepdims=True)
    a = np.where(a > 1.0 - ROW_SUM_TOL, np.minimum(a, 1.0), a)
    return Channel(_frozen(a), labels)


def symmetric_matrix(q: int, delta: float) -> np.ndarray:
    """``1 - delta`` on the diagonal and ``delta/(q-1)`` elsewhere (any real delta)."""
    s = np.full((q, q), delta / (q - 1))
    np.fill_diagonal(s, 1.0 - delta)
    return s


def make_canonical(kind: str, q: int, param: float | None = None) -> Channel:
    """Build ``symmetric`` (q-SC(delta)), ``erasure`` (q-EC(eta)) or ``identity``."""
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise ParameterOutOfRange(f"alphabet size must be an integer >= 2, got {q!r}")
    if kind == "identity":
        return Channel(_frozen(np.eye(q)))
    if param is None or not 0.0 <= param <= 1.0:
        raise ParameterOutOfRange(f"{kind} parameter must lie in [0, 1], got {param!r}")
    if kind == "symmetric":
        return Channel(_frozen(symmetric_matrix(q, param)))
    if kind == "erasure":
        m = np.zeros((q, q + 1))
        m[:, :q] = (1.0 - param) * np.eye(q)
        m[:, q] = param
        return Channel(_frozen(m))
    raise ParameterOutOfRange(f"unknown channel family {kind!r}")


def bsc(delta: float) -> Channel:
    return make_canonical("symmetric", 2, delta)


def symmetric(q: int, delta: float) -> Channel:
    return make_canonical("symmetric", q, delta)


def erasure(q: int, eta: float) -> Channel:
    return make_canonical("erasure", q, eta)


def identity(q: int) -> Channel:
    return make_canonical("identity", q)


def transmit(channel: Channel, codeword: Codeword, rng: np.random.Generator,
             order: str = DMC_THEN_PERMUTE) -> Codeword:
    """Pass ``codeword`` through the DMC and a uniform random permutation.

    ``order`` selects DMC-then-permute (the channel model) or
    permute-then-DMC (the equivalent model). Noise uniforms are drawn before
    permutation uniforms in both cases.
    """
    if codeword.alphabet_size != channel.input_size:
        raise AlphabetMismatch(
            f"codeword alphabet {codeword.alphabet_size} != channel inputs {channel.input_size}")
    n = codeword.n
    cdf = kernels.cumulative(channel.matrix)
    u_noise = rng.random(n)
    u_perm = rng.random(n)
    x = codeword._zero_based()
    if order == DMC_THEN_PERMUTE:
        out = kernels.sample_rows(x, cdf, u_noise)
        kernels.shuffle(out, u_perm)
    elif order == PERMUTE_THEN_DMC:
        kernels.shuffle(x, u_perm)
        out = kernels.sample_rows(x, cdf, u_noise)
    else:
        raise ParameterOutOfRange(f"unknown order {order!r}")
    return Codeword(out + 1, channel.output_size)


def random_permutation(codeword: Codeword, rng: np.random.Generator) -> Codeword:
    """Uniformly permute the positions of ``codeword``."""
    x = codeword._zero_based()
    kernels.shuffle(x, rng.random(codeword.n))
    return Codeword(x + 1, codeword.alphabet_size)


def push_forward(dist: DistVector | Sequence[float], channel: Channel) -> DistVector:
    p = dist.probs if isinstance(dist, DistVector) else np.asarray(dist, dtype=float)
    if p.shape[0] != channel.input_size:
        raise AlphabetMismatch(f"distribution has {p.shape[0]} entries, channel has "
                               f"{channel.input_size} inputs")
    return DistVector(p @ channel.matrix)


def empirical_distribution(codeword: Codeword) -> Histogram:
    return Histogram(kernels.bincount(codeword._zero_based(), codeword.alphabet_size))


# -- JSON interchange ------------------------------------------------------

def channel_from_dict(d: dict, *, min_size: int = 2) -> Channel:
    if not isinstance(d, dict) or "rows" not in d:
        raise DegenerateShape("channel JSON must be an object with a 'rows' field")
    ch = validate_channel(d["rows"], min_size=min_size, labels=d.get("labels"))
    for key, actual in (("input_size", ch.input_size), ("output_size", ch.output_size)):
        if key in d and int(d[key]) != actual:
            raise DegenerateShape(f"{key}={d[key]} disagrees with rows ({actual})")
    return ch


def load_channel(path, *, min_size: int = 2) -> Channel:
    with open(Path(path)) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DegenerateShape(f"{path}: not valid JSON ({exc})") from None
    return channel_from_dict(d, min_size=min_size)


def save_channel(channel: Channel, path):
    Path(path).write_text(json.dumps(channel.to_dict(), indent=2) + "\n")
