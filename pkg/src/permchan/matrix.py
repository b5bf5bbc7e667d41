"""Linear-algebraic summaries of a channel matrix.

Input indices reported by this module (``row_subset``, ``extreme_rows``)
are 1-based, matching the channel alphabets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

from permchan.channel import Channel
from permchan.errors import RankDeficientSubset, SolverFailure

RANK_TOL = 1e-10
HULL_TOL = 1e-9
DUPLICATE_TOL = 1e-12
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class ExtremeRowDecomposition:
    """Convex weights over the extreme rows for every non-extreme input.

    ``weights[x]`` maps each extreme input index to its weight; keys and
    ``x`` are 1-based input indices.
    """

    weights: dict

    def reconstruct(self, channel: Channel, x: int) -> np.ndarray:
        return sum(w * channel.matrix[e - 1] for e, w in self.weights[x].items())


@dataclass(frozen=True)
class ChannelProfile:
    rank_r: int
    row_subset: tuple
    reduced_matrix: np.ndarray
    right_pinv: np.ndarray
    sigma: float
    sigma_min: float
    ext_count: int
    extreme_rows: tuple
    decomposition: ExtremeRowDecomposition
    nu: float
    strictly_positive: bool
    doeblin_eta: float
    input_size: int
    output_size: int

    def to_dict(self):
        return {
            "rank_r": self.rank_r,
            "row_subset": list(self.row_subset),
            "reduced_matrix": self.reduced_matrix.tolist(),
            "right_pinv": self.right_pinv.tolist(),
            "sigma": self.sigma,
            "sigma_min": self.sigma_min,
            "ext_count": self.ext_count,
            "extreme_rows": list(self.extreme_rows),
            "decomposition": {str(x): {str(e): w for e, w in ws.items()}
                              for x, ws in self.decomposition.weights.items()},
            "nu": self.nu,
            "strictly_positive": self.strictly_positive,
            "doeblin_eta": self.doeblin_eta,
        }


def _rank(a, tol):
    s = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def numerical_rank(channel: Channel, tol: float = RANK_TOL) -> int:
    """Count singular values above ``tol`` times the largest one."""
    return _rank(channel.matrix, tol)


def _hull_residual(target, points):
    """Smallest total L1 slack to write ``target`` as a convex combination of ``points``.

    Variables are ``[w (k), s_plus (d), s_minus (d)]``.
    """
    k, d = points.shape
    c = np.concatenate([np.zeros(k), np.ones(2 * d)])
    a_eq = np.zeros((d + 1, k + 2 * d))
    a_eq[:d, :k] = points.T
    a_eq[:d, k:k + d] = np.eye(d)
    a_eq[:d, k + d:] = -np.eye(d)
    a_eq[d, :k] = 1.0
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs",
                  options=LP_OPTIONS)
    if res.status != 0:
        raise SolverFailure(f"hull membership LP failed: {res.message}")
    return res.fun


def _convex_weights(target, points):
    """Non-negative weights summing to one that reproduce ``target``."""
    scale = 1e3
    a = np.vstack([points.T, scale * np.ones(points.shape[0])])
    b = np.concatenate([target, [scale]])
    w, _ = nnls(a, b)
    return w / w.sum()


def extreme_rows(channel: Channel):
    """Find the rows that are extreme points of the convex hull of all rows.

    Duplicate rows are represented once, by their lowest index. A distinct
    row is extreme iff an LP cannot express it as a convex combination of
    the other distinct rows with slack at most 1e-9.

    Returns
    -------
    extremes : list of int
        1-based input indices of the extreme rows.
    decomposition : ExtremeRowDecomposition
        Convex weights over ``extremes`` for every other input.
    """
    m = channel.matrix
    reps = []
    rep_of = {}
    for x in range(m.shape[0]):
        for r in reps:
            if np.max(np.abs(m[x] - m[r])) <= DUPLICATE_TOL:
                rep_of[x] = r
                break
        else:
            reps.append(x)
            rep_of[x] = x
    if len(reps) == 1:
        extremes = list(reps)
    else:
        extremes = [r for r in reps
                    if _hull_residual(m[r], m[[o for o in reps if o != r]]) > HULL_TOL]
    weights = {}
    ext_pts = m[extremes]
    for x in range(m.shape[0]):
        if x in extremes:
            continue
        if rep_of[x] in extremes:
            weights[x + 1] = {rep_of[x] + 1: 1.0}
        else:
            w = _convex_weights(m[x], ext_pts)
            weights[x + 1] = {e + 1: float(wi) for e, wi in zip(extremes, w) if wi > 0}
    return [e + 1 for e in extremes], ExtremeRowDecomposition(weights)


def right_inverse(a: np.ndarray) -> np.ndarray:
    """``A^T (A A^T)^{-1}`` for a matrix with linearly independent rows."""
    return np.linalg.solve(a @ a.T, a).T


def doeblin_coefficient(channel: Channel) -> float:
    """Sum over outputs of the column minimum."""
    return float(np.clip(channel.matrix.min(axis=0).sum(), 0.0, 1.0))


def build_profile(channel: Channel, tol: float = RANK_TOL) -> ChannelProfile:
    m = channel.matrix
    subset = []
    for x in range(m.shape[0]):
        if _rank(m[subset + [x]], tol) > len(subset):
            subset.append(x)
    rank = numerical_rank(channel, tol)
    if len(subset) != rank:
        raise RankDeficientSubset(
            f"greedy subset has {len(subset)} rows but the channel has rank {rank}")
    reduced = m[subset].copy()
    pinv = right_inverse(reduced)
    svals = np.linalg.svd(reduced, compute_uv=False)
    extremes, decomposition = extreme_rows(channel)
    nu = float(m.min())
    for a in (reduced, pinv):
        a.setflags(write=False)
    return ChannelProfile(
        rank_r=rank,
        row_subset=tuple(x + 1 for x in subset),
        reduced_matrix=reduced,
        right_pinv=pinv,
        sigma=float(np.linalg.norm(pinv, 2)),
        sigma_min=float(svals[-1]),
        ext_count=len(extremes),
        extreme_rows=tuple(extremes),
        decomposition=decomposition,
        nu=nu,
        strictly_positive=nu > 0.0,
        doeblin_eta=doeblin_coefficient(channel),
        input_size=channel.input_size,
        output_size=channel.output_size,
    )
