"""The degradation preorder: explicit witnesses and an LP feasibility test.

A channel ``A`` is a degraded version of ``B`` when ``A = B @ W`` for some
row-stochastic ``W``; ``W`` is the witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from permchan.channel import Channel, DistVector, erasure, symmetric_matrix, validate_channel
from permchan.errors import (AlphabetMismatch, ChannelError, MinorizationViolated,
                             NotStrictlyPositive, ParameterOutOfRange, SingularChannel,
                             SolverFailure)

CLAMP_TOL = 1e-12
FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class DegradationWitness:
    intermediate: Channel
    residual: float


def _clean_stochastic(w):
    """Clamp entries in [-1e-12, 0) to zero and renormalise rows."""
    if (w < -CLAMP_TOL).any():
        i, j = np.argwhere(w < -CLAMP_TOL)[0]
        raise ChannelError(f"witness entry ({i}, {j}) = {w[i, j]:.3g} is negative")
    w = np.clip(w, 0.0, None)
    return w / w.sum(axis=1, keepdims=True)


def _witness(dominator: np.ndarray, w: np.ndarray, target: np.ndarray) -> DegradationWitness:
    w = _clean_stochastic(w)
    residual = float(np.max(np.abs(dominator @ w - target)))
    return DegradationWitness(validate_channel(w, min_size=1), residual)


def symmetric_inverse_parameter(q: int, delta: float) -> float:
    """Parameter ``tau`` with ``S_delta^{-1} = S_tau`` for q-ary symmetric matrices."""
    if q < 2:
        raise ParameterOutOfRange("q must be at least 2")
    denom = 1.0 - delta - delta / (q - 1)
    if abs(delta - (q - 1) / q) <= 1e-12:
        raise SingularChannel(f"S_delta is singular at delta = (q-1)/q = {(q - 1) / q}")
    return -delta / denom


def symmetric_dominator(channel: Channel):
    """Largest q-SC crossover that ``channel`` is guaranteed to be degraded from.

    Uses the minimum-entry bound ``nu / (1 - nu + nu/(q-1))`` and builds the
    witness ``S_tau @ P`` at that crossover.

    Returns
    -------
    delta_max : float
    witness : DegradationWitness
    """
    q = channel.input_size
    p = channel.matrix
    nu = float(p.min())
    if nu <= 0.0:
        raise NotStrictlyPositive("channel has a zero entry; the symmetric bound is vacuous")
    if abs(nu - 0.5) <= CLAMP_TOL:
        # every row is (1/2, 1/2): S_delta @ P = P for all delta
        delta_max = (q - 1) / q
        return delta_max, _witness(symmetric_matrix(q, delta_max), p.copy(), p)
    delta_max = nu / (1.0 - nu + nu / (q - 1))
    tau = symmetric_inverse_parameter(q, delta_max)
    s_delta = symmetric_matrix(q, delta_max)
    w = symmetric_matrix(q, tau) @ p
    return delta_max, _witness(s_delta, w, p)


def doeblin_witness(channel: Channel, eta: float, q_z) -> Channel:
    """Channel ``V`` on inputs ``X + {E}`` with ``erasure(q, eta) @ V == channel``.

    Requires ``P(z|x) >= eta * q_z(z)`` everywhere.
    """
    if not 0.0 < eta < 1.0:
        raise ParameterOutOfRange(f"eta must lie in (0, 1), got {eta!r}")
    qz = q_z.probs if isinstance(q_z, DistVector) else DistVector(q_z).probs
    p = channel.matrix
    if qz.shape[0] != channel.output_size:
        raise AlphabetMismatch("q_z must be a distribution on the channel output alphabet")
    slack = p - eta * qz
    if (slack < -CLAMP_TOL).any():
        x, z = np.argwhere(slack < -CLAMP_TOL)[0]
        raise MinorizationViolated(int(x) + 1, int(z) + 1, float(-slack[x, z]))
    rows = np.vstack([slack / (1.0 - eta), qz])
    return validate_channel(_clean_stochastic(rows), min_size=1)


def degradation_feasibility(dominator: Channel, degraded: Channel,
                            tol: float = FEASIBILITY_TOL) -> DegradationWitness | None:
    """Search for a row-stochastic ``W`` with ``dominator @ W == degraded``.

    Solves ``min t`` subject to ``|dominator @ W - degraded| <= t`` entrywise,
    ``W >= 0`` and unit row sums. The pair is declared feasible iff the
    optimal ``t`` is at most ``tol``; the witness is returned, else ``None``.
    """
    b = dominator.matrix
    a = degraded.matrix
    if b.shape[0] != a.shape[0]:
        raise AlphabetMismatch("channels must share an input alphabet")
    m, z1 = b.shape
    z2 = a.shape[1]
    nv = z1 * z2 + 1  # W flattened row-major, then t
    # (B W)[x, j] = sum_i B[x, i] W[i, j]
    coef = np.zeros((m * z2, nv))
    for x in range(m):
        for j in range(z2):
            coef[x * z2 + j, j:z1 * z2:z2] = b[x]
    a_ub = np.vstack([coef, -coef])
    a_ub[:, -1] = -1.0
    b_ub = np.concatenate([a.reshape(-1), -a.reshape(-1)])
    a_eq = np.zeros((z1, nv))
    for i in range(z1):
        a_eq[i, i * z2:(i + 1) * z2] = 1.0
    c = np.zeros(nv)
    c[-1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.ones(z1),
                  bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise SolverFailure(f"degradation LP failed: {res.message}")
    if res.fun > tol:
        return None
    w = res.x[:-1].reshape(z1, z2)
    return _witness(b, w, a)


def extremal_erasure_probability(channel: Channel, tol: float = 1e-9) -> float:
    """Bisect for the largest eta with ``channel`` degraded from ``erasure(q, eta)``."""
    q = channel.input_size
    lo, hi = 0.0, 1.0
    if degradation_feasibility(erasure(q, 1.0), channel) is not None:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if degradation_feasibility(erasure(q, mid), channel) is not None:
            lo = mid
        else:
            hi = mid
    return lo
