"""Regression suite behind ``permchan verify``.

Each check records the invariant it guards, so a failure names what broke.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from permchan.capacity import capacity_bounds
from permchan.channel import Channel, bsc, channel_from_dict, symmetric
from permchan.coding import CodeConfig, input_distribution
from permchan.degradation import (degradation_feasibility, extremal_erasure_probability,
                                  symmetric_dominator)
from permchan.errors import InstanceTooLarge, PermchanError
from permchan.matrix import build_profile, doeblin_coefficient
from permchan.oracle import (binomial_entropy_check, hoeffding_tail_check, test_bounds as bounds_report,
                             verify_equivalent_model)

FIXTURE_DIR = Path(__file__).with_name("fixtures")
EQUIV_TOL = 1e-12
WITNESS_TOL = 1e-9


@dataclass
class Check:
    name: str
    invariant: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "invariant": self.invariant, "passed": self.passed,
                "detail": self.detail}


def load_fixtures(directory=FIXTURE_DIR):
    """Split fixture JSON files into channels and ``(dominator, degraded, witness)`` triples."""
    channels, triples = {}, {}
    for path in sorted(Path(directory).glob("*.json")):
        d = json.loads(path.read_text())
        if "witness" in d:
            triples[path.stem] = (channel_from_dict(d["dominator"], min_size=1),
                                  channel_from_dict(d["degraded"], min_size=1),
                                  np.array(d["witness"]["rows"] if isinstance(d["witness"], dict)
                                           else d["witness"], dtype=float))
        else:
            channels[path.stem] = channel_from_dict(d)
    return channels, triples


def check_equivalent_model(name, channel, max_n=3):
    out = []
    for n in range(1, max_n + 1):
        try:
            gap = verify_equivalent_model(channel, n)
        except InstanceTooLarge:
            continue
        out.append(Check(f"{name}/n={n}", "equivalent-model", gap <= EQUIV_TOL, {"max_abs_diff": gap}))
    return out


def check_witness(name, dominator: Channel, degraded: Channel, w: np.ndarray):
    detail = {}
    ok = w.shape == (dominator.output_size, degraded.output_size)
    if ok:
        detail["min_entry"] = float(w.min())
        detail["row_sum_dev"] = float(np.max(np.abs(w.sum(axis=1) - 1.0)))
        detail["residual"] = float(np.max(np.abs(dominator.matrix @ w - degraded.matrix)))
        ok = (detail["min_entry"] >= -1e-12 and detail["row_sum_dev"] <= WITNESS_TOL
              and detail["residual"] <= WITNESS_TOL)
    else:
        detail["shape"] = list(w.shape)
    return Check(name, "degradation-witness", bool(ok), detail)


def check_bounds_sandwich(instances=100, seed=2024):
    rng = np.random.default_rng(seed)
    bad = {"le-cam-relation": 0, "second-moment-lower": 0, "converging-hypotheses-upper": 0}
    for _ in range(instances):
        size = int(rng.integers(2, 5))
        n = int(rng.integers(1, 7))
        p, q = rng.dirichlet(np.ones(size)), rng.dirichlet(np.ones(size))
        rep = bounds_report(p, q, n)
        if abs(rep.exact_ml_error - (1 - rep.exact_tv) / 2) > 1e-12:
            bad["le-cam-relation"] += 1
        if rep.second_moment_lower > rep.exact_tv + 1e-12:
            bad["second-moment-lower"] += 1
        if rep.lemma5_premise_holds and rep.exact_ml_error > rep.lemma5_upper + 1e-12:
            bad["converging-hypotheses-upper"] += 1
    return [Check(f"random-pairs/{instances}", inv, v == 0, {"violations": v})
            for inv, v in bad.items()]


def check_capacity(name, channel):
    try:
        b = capacity_bounds(channel)
    except (PermchanError, ValueError) as exc:
        return Check(name, "capacity-bounds", False, {"error": str(exc)})
    return Check(name, "capacity-bounds", True, b.to_dict())


def check_symmetric_dominator(name, channel):
    delta, wit = symmetric_dominator(channel)
    check = check_witness(name, symmetric(channel.input_size, delta), channel,
                          wit.intermediate.matrix)
    check.invariant = "symmetric-dominator"
    check.detail["delta_max"] = delta
    return check


def check_doeblin(name, channel, tol=1e-6):
    closed = doeblin_coefficient(channel)
    found = extremal_erasure_probability(channel)
    return Check(name, "doeblin-coefficient", abs(closed - found) <= tol,
                 {"closed_form": closed, "bisection": found})


def check_hoeffding(seed=11, trials=4000):
    rng = np.random.default_rng(seed)
    out = []
    for ch, label in ((bsc(0.2), "bsc(0.2)"), (symmetric(3, 0.1), "3-sc(0.1)")):
        profile = build_profile(ch)
        code = CodeConfig(profile, 400, 0.1)
        msg = code.lattice[len(code.lattice) // 2]
        pin = input_distribution(msg, code)
        for gamma in (0.05, 0.1, 0.2):
            freq, bound, mc = hoeffding_tail_check(ch, profile, pin, 400, gamma, trials, rng)
            out.append(Check(f"{label}/gamma={gamma}", "hoeffding-tail",
                             freq <= bound + 3 * mc + 1.0 / trials,
                             {"frequency": freq, "bound": bound, "mc_sigma": mc}))
    return out


def check_binomial_entropy(c_half=1.0):
    """``gap * n`` must not grow over ``n`` in [10, 1000].

    For ``p = 1/2`` it must also stay below ``c_half`` bits.
    """
    grid = np.unique(np.logspace(1, 3, 13).astype(int))
    out = []
    for p in (0.1, 0.3, 0.5):
        scaled = np.array([binomial_entropy_check(int(n), p)[2] * n for n in grid])
        small, large = scaled[grid < 100], scaled[grid >= 100]
        ok = large.max() <= small.max()
        if p == 0.5:
            ok = ok and scaled.max() <= c_half
        out.append(Check(f"p={p}", "binomial-entropy-rate", bool(ok),
                         {"n": grid.tolist(), "gap_times_n": scaled.tolist()}))
    return out


def check_threshold_bound(trials=200, seed=5):
    """Simulated thresholding error stays within the analytic bound where it is non-vacuous."""
    from permchan.harness import ExperimentConfig, run_experiment

    cfg = ExperimentConfig(channel=bsc(0.2), scheme="threshold", epsilon=0.25,
                           n_grid=[100_000], trials=trials, seed=seed)
    out = []
    for r in run_experiment(cfg, workers=4):
        ok = r.analytic_bound >= 1 or r.error_rate <= r.analytic_bound + 3 * r.wilson_radius
        out.append(Check(f"bsc(0.2)/n={r.n}", "threshold-error-bound", bool(ok),
                         {"error_rate": r.error_rate, "bound": r.analytic_bound,
                          "wilson_radius": r.wilson_radius}))
    return out


def run_suite(scope="fast", fixtures=FIXTURE_DIR):
    """Run the suite and return ``(passed, report_dict)``."""
    channels, triples = load_fixtures(fixtures)
    checks = []
    for name, ch in channels.items():
        checks += check_equivalent_model(name, ch)
        checks.append(check_capacity(name, ch))
    for name, (dom, deg, w) in triples.items():
        checks.append(check_witness(name, dom, deg, w))
    checks += check_bounds_sandwich()
    if scope == "full":
        for name, ch in channels.items():
            if ch.matrix.min() > 0:
                checks.append(check_symmetric_dominator(name, ch))
            checks.append(check_doeblin(name, ch))
        for name, (dom, deg, _) in triples.items():
            checks.append(Check(name, "degradation-lp",
                                degradation_feasibility(dom, deg) is not None))
        checks += check_hoeffding()
        checks += check_binomial_entropy()
        checks += check_threshold_bound()
    failed = [c for c in checks if not c.passed]
    report = {
        "scope": scope,
        "passed": not failed,
        "total": len(checks),
        "failed": [{"name": c.name, "invariant": c.invariant} for c in failed],
        "checks": [c.to_dict() for c in checks],
    }
    return not failed, report
