"""Exact small-instance computations used to check the simulators and decoders.

Everything here is brute force over types (histograms) or, where the
identity under test needs it, over raw sequences. Inputs are capped so the
enumerations stay below about a million terms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from permchan.channel import Channel, Codeword, DistVector, Histogram, empirical_distribution
from permchan.coding import encode_composition, input_distribution
from permchan.errors import AlphabetMismatch, InstanceTooLarge, ParameterOutOfRange
from permchan.matrix import ChannelProfile

ENUM_CAP = 10**6
EPS_MARGIN = 1e-12


# -- type enumeration ------------------------------------------------------

def compositions(n: int, size: int):
    """All count vectors of length ``size`` summing to ``n``, lexicographic."""
    if size == 1:
        yield (n,)
        return
    for c in range(n + 1):
        for rest in compositions(n - c, size - 1):
            yield (c,) + rest


def type_count(n: int, size: int) -> int:
    return math.comb(n + size - 1, size - 1)


def log_type_probability(counts, probs) -> float:
    """Natural log of the probability that ``n`` i.i.d. draws from ``probs`` have type ``counts``."""
    out = math.lgamma(sum(counts) + 1)
    for c, p in zip(counts, probs):
        if c == 0:
            continue
        if p <= 0.0:
            return -math.inf
        out += c * math.log(p) - math.lgamma(c + 1)
    return out


def type_law(probs, n: int) -> dict:
    """``{type: probability}`` for ``n`` i.i.d. draws from ``probs``."""
    probs = np.asarray(probs, dtype=float)
    if type_count(n, probs.size) > ENUM_CAP:
        raise InstanceTooLarge(f"{type_count(n, probs.size)} types exceed the cap of {ENUM_CAP}")
    law = {}
    for t in compositions(n, probs.size):
        lp = log_type_probability(t, probs)
        if lp > -math.inf:
            law[t] = math.exp(lp)
    return law


# -- end-to-end output law -------------------------------------------------

@dataclass(frozen=True)
class OutputLaw:
    """Exact law of the permuted channel output for one input codeword.

    The permutation makes every sequence of a given type equally likely, so
    the law is stored per type.
    """

    type_probs: dict
    n: int
    alphabet_size: int

    def type_probability(self, counts) -> float:
        return self.type_probs.get(tuple(int(c) for c in counts), 0.0)

    def sequence_prob(self, y) -> float:
        y = y if isinstance(y, Codeword) else Codeword(y, self.alphabet_size)
        hist = empirical_distribution(y)
        return self.type_probability(hist.counts) / hist.multinomial()


def exact_output_law(channel: Channel, x: Codeword) -> OutputLaw:
    """Exact output type law of DMC-then-permute for input codeword ``x``.

    Each input letter ``a`` with count ``c_a`` contributes a multinomial
    ``(c_a, P[a])`` over output counts; the output type is their sum.
    """
    if x.alphabet_size != channel.input_size:
        raise AlphabetMismatch("codeword is not over the channel input alphabet")
    size = channel.output_size
    if size ** x.n > ENUM_CAP:
        raise InstanceTooLarge(f"|Y|^n = {size}^{x.n} exceeds the cap of {ENUM_CAP}")
    law = {(0,) * size: 1.0}
    for a, c in enumerate(empirical_distribution(x).counts):
        if c == 0:
            continue
        part = type_law(channel.matrix[a], int(c))
        acc = {}
        for t0, p0 in law.items():
            for t1, p1 in part.items():
                key = tuple(u + v for u, v in zip(t0, t1))
                acc.setdefault(key, []).append(p0 * p1)
        law = {k: math.fsum(v) for k, v in acc.items()}
    return OutputLaw(law, x.n, size)


# -- equivalent model ------------------------------------------------------

def product_channel(channel: Channel, n: int) -> np.ndarray:
    """``P^{(x) n}`` indexed by lexicographic sequence order."""
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, channel.matrix)
    return out


def _sequence_index(seq, size):
    idx = 0
    for s in seq:
        idx = idx * size + s
    return idx


def verify_equivalent_model(channel: Channel, n: int) -> float:
    """Max-abs gap between DMC-then-permute and permute-then-DMC conditional laws.

    Both laws are built from raw sequences and all ``n!`` permutations:
    ``law1 = P^n @ Pi`` with ``Pi`` the averaged permutation matrix on output
    sequences, and ``law2 = mean_lambda P^n[lambda(x)]``.
    """
    xs, ys = channel.input_size, channel.output_size
    if (xs * ys) ** n > ENUM_CAP or n > 8:
        raise InstanceTooLarge(f"(|X||Y|)^n = {(xs * ys) ** n} exceeds the cap of {ENUM_CAP}")
    pn = product_channel(channel, n)
    perms = list(itertools.permutations(range(n)))
    ny = ys ** n
    pi = np.zeros((ny, ny))
    for z in itertools.product(range(ys), repeat=n):
        zi = _sequence_index(z, ys)
        for lam in perms:
            pi[zi, _sequence_index([z[lam[i]] for i in range(n)], ys)] += 1.0
    pi /= len(perms)
    law1 = pn @ pi
    law2 = np.zeros_like(law1)
    for x in itertools.product(range(xs), repeat=n):
        xi = _sequence_index(x, xs)
        for lam in perms:
            law2[xi] += pn[_sequence_index([x[lam[i]] for i in range(n)], xs)]
    law2 /= len(perms)
    return float(np.max(np.abs(law1 - law2)))


# -- binary hypothesis testing ---------------------------------------------

@dataclass(frozen=True)
class TestBoundsReport:
    __test__ = False

    exact_tv: float
    exact_ml_error: float
    second_moment_lower: float
    lemma5_upper: float | None
    lemma5_premise_holds: bool
    epsilon_n: float | None

    def to_dict(self):
        return dict(self.__dict__)


def second_moment_lower_bound(p, q, n: int) -> float:
    """``||p - q||^2 / (4 sum Var)`` with the exact variance of the mixed-sample type."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d2 = float(np.sum((p - q) ** 2))
    if d2 == 0.0:
        return 0.0
    var = p * (1 - p) / (2 * n) + q * (1 - q) / (2 * n) + (p - q) ** 2 / 4
    return d2 / (4.0 * float(var.sum()))


def converging_hypotheses_bound(p, q, n: int):
    """Largest admissible ``eps_n`` and the matching ML error bound.

    Requires ``||p - q||_2 >= n^{-(1/2 - eps_n)}``. ``eps_n`` is taken with
    equality and capped at 1/2. Returns ``(premise_holds, eps_n, bound)``;
    the last two are ``None`` when no positive ``eps_n`` exists.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = float(np.linalg.norm(p - q))
    if d == 0.0:
        return False, None, None
    if n == 1:
        eps = 0.5 if d >= 1.0 else None
    else:
        eps = min(0.5, 0.5 + math.log(d) / math.log(n))
        # eps_n = 0 up to round-off is not admissible
        if eps <= EPS_MARGIN:
            eps = None
    if eps is None:
        return False, None, None
    size = p.size
    return True, eps, size / (2 * size + 2 * n ** (2 * eps))


def test_bounds(p, q, n: int) -> TestBoundsReport:
    """Exact TV and ML error for ``n`` samples, plus the second-moment bounds."""
    p = p.probs if isinstance(p, DistVector) else DistVector(p).probs
    q = q.probs if isinstance(q, DistVector) else DistVector(q).probs
    if p.size != q.size:
        raise AlphabetMismatch("hypotheses must share an alphabet")
    if n < 1:
        raise ParameterOutOfRange("need n >= 1")
    if type_count(n, p.size) > ENUM_CAP:
        raise InstanceTooLarge(f"{type_count(n, p.size)} types exceed the cap of {ENUM_CAP}")
    diffs, losses = [], []
    for t in compositions(n, p.size):
        a = math.exp(log_type_probability(t, p))
        b = math.exp(log_type_probability(t, q))
        diffs.append(abs(a - b))
        # ML picks the likelier hypothesis; the other one's mass is the loss
        losses.append(b if a >= b else a)
    tv = min(1.0, 0.5 * math.fsum(diffs))
    ml_error = 0.5 * math.fsum(losses)
    holds, eps, upper = converging_hypotheses_bound(p, q, n)
    return TestBoundsReport(
        exact_tv=tv,
        exact_ml_error=ml_error,
        second_moment_lower=second_moment_lower_bound(p, q, n),
        lemma5_upper=upper,
        lemma5_premise_holds=holds,
        epsilon_n=eps,
    )


test_bounds.__test__ = False


# -- analytic bounds -------------------------------------------------------

def hoeffding_bound(gamma: float, sigma: float, n: int) -> float:
    """One-sided tail bound ``exp(-n gamma^2 / (2 sigma^2))``."""
    if sigma <= 0:
        raise ParameterOutOfRange("sigma must be positive")
    return math.exp(-n * gamma * gamma / (2.0 * sigma * sigma))


@dataclass(frozen=True)
class AnalyticBounds:
    general: float
    rank2: float | None
    hoeffding: Callable


def general_error_bound(r: int, sigma: float, n: int, epsilon: float) -> float:
    """Thresholding-decoder error bound ``r n^{1/2-eps} exp(-n^{2 eps} / (8 sigma^2))``."""
    return r * n ** (0.5 - epsilon) * math.exp(-n ** (2 * epsilon) / (8.0 * sigma * sigma))


def rank2_error_bound(output_size: int, sigma_min: float, n: int, epsilon: float) -> float:
    """ML error bound for rank-2 channels, ``|Y| pi^2 / (6 sigma_min^2 n^{2 eps})``."""
    return output_size * math.pi ** 2 / (6.0 * sigma_min ** 2 * n ** (2 * epsilon))


def analytic_error_bounds(profile: ChannelProfile, n: int, epsilon: float) -> AnalyticBounds:
    if not 0.0 < epsilon < 0.5:
        raise ParameterOutOfRange(f"epsilon must lie in (0, 1/2), got {epsilon}")
    general = general_error_bound(profile.rank_r, profile.sigma, n, epsilon)
    rank2 = None
    if profile.rank_r == 2:
        rank2 = rank2_error_bound(profile.output_size, profile.sigma_min, n, epsilon)
    return AnalyticBounds(general, rank2, lambda gamma: hoeffding_bound(gamma, profile.sigma, n))


def hoeffding_tail_check(channel: Channel, profile: ChannelProfile, input_probs,
                         n: int, gamma: float, trials: int, rng: np.random.Generator):
    """Monte Carlo upper-tail frequency of one decoder-statistic coordinate.

    Samples ``Z_i`` i.i.d. from ``input_probs @ P``; the summands are the
    entries ``P~^+[Z_i, x]``, bounded by ``sigma``, with mean ``input_probs[x]``
    on each independent row ``x``. Returns ``(worst_frequency, bound, mc_sigma)``
    where the frequency is the largest over coordinates and both tails.
    """
    pin = np.asarray(input_probs, dtype=float)
    pz = pin @ channel.matrix
    means = pin[np.asarray(profile.row_subset) - 1]
    counts = rng.multinomial(n, pz, size=trials)
    stats = counts @ profile.right_pinv / n
    dev = stats - means
    freq = max(float((dev >= gamma).mean(axis=0).max()), float((dev <= -gamma).mean(axis=0).max()))
    bound = hoeffding_bound(gamma, profile.sigma, n)
    mc_sigma = math.sqrt(max(bound * (1 - bound), 0.0) / trials)
    return freq, bound, mc_sigma


# -- binomial entropy ------------------------------------------------------

def binomial_entropy_check(n: int, p: float):
    """Exact binomial entropy in bits against ``1/2 log2(2 pi e n p (1-p))``.

    Returns ``(exact, approx, gap)``.
    """
    if n < 1 or not 0.0 < p < 1.0:
        raise ParameterOutOfRange("need n >= 1 and p in (0, 1)")
    terms = []
    for k in range(n + 1):
        lp = (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
              + k * math.log(p) + (n - k) * math.log1p(-p))
        terms.append(-math.exp(lp) * lp)
    exact = math.fsum(terms) / math.log(2)
    approx = 0.5 * math.log2(2 * math.pi * math.e * n * p * (1 - p))
    return exact, approx, abs(exact - approx)


# -- decoder error by enumeration ------------------------------------------

def message_output_laws(channel: Channel, config) -> list:
    """Output type law for every lattice message under the randomized encoder.

    Sums the codeword-type law of the encoder against :func:`exact_output_law`.
    """
    laws = []
    for msg in config.lattice:
        pin = input_distribution(msg, config)
        acc = {}
        for xt, px in type_law(pin, config.n).items():
            word = encode_composition(Histogram(xt))
            for yt, py in exact_output_law(channel, word).type_probs.items():
                acc.setdefault(yt, []).append(px * py)
        laws.append({t: math.fsum(v) for t, v in acc.items()})
    return laws


def bayes_error(channel: Channel, config) -> float:
    """Minimum average error over uniform messages: ``1 - (1/|M|) sum_t max_m P(t|m)``."""
    laws = message_output_laws(channel, config)
    types = set().union(*laws)
    best = [max(law.get(t, 0.0) for law in laws) for t in types]
    return 1.0 - math.fsum(best) / len(laws)


def decoder_error(channel: Channel, config, decode) -> float:
    """Exact average error of a deterministic type-based ``decode(Codeword)``.

    ``decode`` is called once per output type on a sorted representative.
    """
    laws = message_output_laws(channel, config)
    types = set().union(*laws)
    verdict = {t: decode(encode_composition(Histogram(t))) for t in types}
    hits = [law.get(t, 0.0) for msg, law in zip(config.lattice, laws)
            for t in law if verdict[t] == msg]
    return 1.0 - math.fsum(hits) / len(laws)
