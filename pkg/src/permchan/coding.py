"""Encoders and decoders for noisy permutation channels.

Messages are points of the scaled simplex lattice: ``r`` non-negative
integers summing to ``k``. A message is sent by drawing ``n`` i.i.d. input
symbols from ``numerators / k`` placed on the profile's independent rows.
Decoders only look at the histogram of the received block, which is all
that survives the random permutation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from permchan import kernels
from permchan.channel import Channel, Codeword, Histogram, empirical_distribution
from permchan.errors import (AlphabetMismatch, ConfigMismatch, InstanceTooLarge,
                             LikelihoodDegenerate, MessageCountOverflow,
                             NotPermutationMatrix, ParameterOutOfRange)
from permchan.matrix import ChannelProfile

INDEX_MAX = 2**63 - 1
ML_MESSAGE_CAP = 10**6
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LatticeMessage:
    numerators: tuple
    k: int

    def __post_init__(self):
        nums = tuple(int(p) for p in self.numerators)
        if not nums or any(p < 0 for p in nums) or sum(nums) != self.k:
            raise ParameterOutOfRange(f"{nums} is not a lattice point with k={self.k}")
        object.__setattr__(self, "numerators", nums)

    @property
    def r(self) -> int:
        return len(self.numerators)

    def distribution(self):
        return np.array(self.numerators, dtype=np.float64) / self.k


@lru_cache(maxsize=None)
def _count(r: int, k: int) -> int:
    return math.comb(k + r - 1, r - 1)


class MessageLattice:
    """All lattice messages for ``(r, k)`` in lexicographic order of numerators.

    ``lattice[i]`` unranks an index and ``lattice.index(msg)`` ranks a
    message; neither materialises the full set.
    """

    def __init__(self, r: int, k: int):
        if r < 1 or k < 1:
            raise ParameterOutOfRange(f"need r >= 1 and k >= 1, got r={r}, k={k}")
        self.r, self.k = r, k
        self.count = _count(r, k)
        if self.count > INDEX_MAX:
            raise MessageCountOverflow(f"C({k + r - 1}, {r - 1}) messages overflow int64")

    def __len__(self):
        return self.count

    def __getitem__(self, index: int) -> LatticeMessage:
        if not 0 <= index < self.count:
            raise IndexError(index)
        nums = []
        left = self.k
        for pos in range(self.r - 1):
            rest = self.r - pos - 1
            v = 0
            while True:
                block = _count(rest, left - v)
                if index < block:
                    break
                index -= block
                v += 1
            nums.append(v)
            left -= v
        nums.append(left)
        return LatticeMessage(tuple(nums), self.k)

    def index(self, msg: LatticeMessage) -> int:
        if msg.k != self.k or msg.r != self.r:
            raise ConfigMismatch(f"message {msg} does not belong to lattice (r={self.r}, k={self.k})")
        idx = 0
        left = self.k
        for pos, v in enumerate(msg.numerators[:-1]):
            rest = self.r - pos - 1
            idx += sum(_count(rest, left - u) for u in range(v))
            left -= v
        return idx

    def __iter__(self):
        def rec(prefix, left, slots):
            if slots == 1:
                yield prefix + (left,)
                return
            for v in range(left + 1):
                yield from rec(prefix + (v,), left - v, slots - 1)
        for nums in rec((), self.k, self.r):
            yield LatticeMessage(nums, self.k)

    def numerator_matrix(self):
        return np.array([m.numerators for m in self], dtype=np.int64).reshape(self.count, self.r)


def message_lattice(r: int, k: int) -> MessageLattice:
    return MessageLattice(r, k)


def lattice_denominator(n: int, epsilon: float) -> int:
    """``floor(n ** (1/2 - epsilon))``, guarded against round-off at exact powers."""
    x = n ** (0.5 - epsilon)
    return int(math.floor(x * (1.0 + 1e-12)))


@dataclass(frozen=True)
class CodeConfig:
    """Blocklength, rate gap and the derived lattice denominator.

    ``k`` defaults to ``floor(n ** (1/2 - epsilon))``; passing it explicitly
    overrides the rule (used for toy ML experiments). ``support`` lists the
    1-based input letters that carry the message and defaults to the
    profile's independent rows; the thresholding decoder requires the
    default.
    """

    profile: ChannelProfile
    n: int
    epsilon: float
    k: int | None = None
    support: tuple | None = None
    lattice: MessageLattice = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ParameterOutOfRange(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.n < 1:
            raise ParameterOutOfRange("blocklength must be positive")
        k = self.k if self.k is not None else lattice_denominator(self.n, self.epsilon)
        if k < 1:
            raise ParameterOutOfRange(f"lattice denominator k={k} < 1 for n={self.n}")
        support = self.profile.row_subset if self.support is None else self.support
        support = tuple(int(x) for x in support)
        if not support or len(set(support)) != len(support) or \
                min(support) < 1 or max(support) > self.profile.input_size:
            raise ParameterOutOfRange(f"invalid message support {support}")
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "lattice", MessageLattice(len(support), int(k)))

    @property
    def r(self) -> int:
        return len(self.support)

    @property
    def k_is_default(self) -> bool:
        return self.k == lattice_denominator(self.n, self.epsilon)

    @property
    def message_count(self) -> int:
        return self.lattice.count


def input_distribution(msg: LatticeMessage, config: CodeConfig) -> np.ndarray:
    """Full input distribution: ``p_x/k`` on the support letters, zero elsewhere."""
    _check_message(msg, config)
    p = np.zeros(config.profile.input_size)
    p[np.asarray(config.support) - 1] = msg.distribution()
    return p


def _check_message(msg: LatticeMessage, config: CodeConfig):
    if msg.r != config.r or msg.k != config.k:
        raise ConfigMismatch(
            f"message (r={msg.r}, k={msg.k}) does not match config "
            f"(r={config.r}, k={config.k})")


def encode_randomized(msg: LatticeMessage, config: CodeConfig,
                      rng: np.random.Generator) -> Codeword:
    p = input_distribution(msg, config)
    cdf = kernels.cumulative(p[None, :])
    x = kernels.sample_rows(np.zeros(config.n, dtype=np.int64), cdf, rng.random(config.n))
    return Codeword(x + 1, config.profile.input_size)


def threshold_statistic(received: Codeword, profile: ChannelProfile) -> np.ndarray:
    """Estimate of the input distribution on the independent rows: ``P_hat @ P~^+``."""
    if received.alphabet_size != profile.output_size:
        raise AlphabetMismatch(
            f"received alphabet {received.alphabet_size} != {profile.output_size} outputs")
    phat = empirical_distribution(received).probabilities()
    return phat @ profile.right_pinv


def decode_threshold(received: Codeword, config: CodeConfig,
                     rng: np.random.Generator) -> LatticeMessage | None:
    """Element-wise thresholding decoder.

    Each coordinate of the statistic is rounded to the nearest multiple of
    ``1/k`` in ``[0, 1]``; equidistant candidates are broken uniformly at
    random. Returns ``None`` (the error symbol) when the rounded numerators
    do not sum to ``k``.
    """
    if config.support != config.profile.row_subset:
        raise ConfigMismatch("thresholding needs the message on the independent rows")
    k = config.k
    t = threshold_statistic(received, config.profile) * k
    nums = []
    for v in t:
        lo = min(max(math.floor(v), 0), k)
        hi = min(lo + 1, k)
        d_lo, d_hi = abs(v - lo), abs(v - hi)
        if hi == lo or d_lo < d_hi - TIE_TOL:
            nums.append(lo)
        elif d_hi < d_lo - TIE_TOL:
            nums.append(hi)
        else:
            nums.append(lo if rng.integers(2) == 0 else hi)
    if sum(nums) != k:
        return None
    return LatticeMessage(tuple(nums), k)


def message_log_likelihoods(counts: np.ndarray, channel: Channel, config: CodeConfig):
    """Log-likelihood of an observed histogram under every message, in lattice order."""
    if config.message_count > ML_MESSAGE_CAP:
        raise InstanceTooLarge(
            f"{config.message_count} messages exceed the ML cap of {ML_MESSAGE_CAP}; "
            "use the thresholding decoder")
    rows = channel.matrix[np.asarray(config.support) - 1]
    pz = (config.lattice.numerator_matrix() / config.k) @ rows
    with np.errstate(divide="ignore"):
        logp = np.log(pz)
    observed = counts > 0
    return logp[:, observed] @ counts[observed].astype(np.float64)


def decode_ml_lattice(received: Codeword, channel: Channel,
                      config: CodeConfig) -> LatticeMessage:
    """Maximum-likelihood decoding over the whole message lattice.

    Ties (within a relative 1e-12) go to the lexicographically smallest
    message. If no message can produce the observation, the smallest message
    is returned and :class:`LikelihoodDegenerate` is warned.
    """
    if received.alphabet_size != channel.output_size:
        raise AlphabetMismatch("received word is not over the channel output alphabet")
    counts = empirical_distribution(received).counts
    scores = message_log_likelihoods(counts, channel, config)
    best = scores.max()
    if best == -np.inf:
        warnings.warn("all messages have zero likelihood", LikelihoodDegenerate, stacklevel=2)
        return config.lattice[0]
    tol = TIE_TOL * max(1.0, abs(best))
    return config.lattice[int(np.flatnonzero(scores >= best - tol)[0])]


def encode_composition(hist: Histogram) -> Codeword:
    """Sorted block codeword ``(1,...,1, 2,...,2, ...)`` with the given type."""
    symbols = np.repeat(np.arange(1, hist.alphabet_size + 1), hist.counts)
    return Codeword(symbols, hist.alphabet_size)


def permutation_of(channel: Channel) -> np.ndarray | None:
    """0-based image of each input under a 0/1 permutation matrix, else ``None``."""
    m = channel.matrix
    if m.shape[0] != m.shape[1]:
        return None
    ones = np.abs(m - 1.0) <= 1e-12
    zeros = np.abs(m) <= 1e-12
    if not (ones | zeros).all():
        return None
    if not ((ones.sum(axis=1) == 1).all() and (ones.sum(axis=0) == 1).all()):
        return None
    return np.argmax(ones, axis=1)


def decode_permutation_channel(received: Codeword, channel: Channel) -> Histogram:
    """Recover the input type exactly: ``n * P @ P_hat``."""
    perm = permutation_of(channel)
    if perm is None:
        raise NotPermutationMatrix("channel is not a 0/1 permutation matrix")
    if received.alphabet_size != channel.output_size:
        raise AlphabetMismatch("received word is not over the channel output alphabet")
    counts_y = empirical_distribution(received).counts
    return Histogram(counts_y[perm])


def decode_erasure_symmetrized(received: Codeword, q: int, config: CodeConfig,
                               rng: np.random.Generator) -> LatticeMessage | None:
    """Replace every erasure by an independent uniform letter, then threshold-decode.

    ``config`` must be built on the profile of the q-ary symmetric channel
    with crossover ``eta * (q - 1) / q``.
    """
    if received.alphabet_size != q + 1:
        raise AlphabetMismatch(f"expected symbols over 1..{q + 1} (erasure = {q + 1})")
    y = received.symbols.copy()
    erased = np.flatnonzero(y == q + 1)
    if erased.size:
        y[erased] = rng.integers(1, q + 1, size=erased.size)
    return decode_threshold(Codeword(y, q), config, rng)
