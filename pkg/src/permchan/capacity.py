"""Lower and upper bounds on the noisy permutation channel capacity.

Bounds are held as :class:`fractions.Fraction` so table lookups such as
``1/2`` or ``3`` compare exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from permchan.channel import Channel
from permchan.coding import permutation_of
from permchan.errors import ParameterOutOfRange
from permchan.matrix import ChannelProfile, build_profile

ENTRY_TOL = 1e-12


@dataclass(frozen=True)
class CapacityBounds:
    lower: Fraction
    upper: Fraction
    exact: bool
    rules: tuple = ()
    annotations: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"inconsistent bounds [{self.lower}, {self.upper}]")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact bounds must coincide")

    def to_dict(self):
        return {
            "lower": float(self.lower),
            "upper": float(self.upper),
            "lower_exact": str(self.lower),
            "upper_exact": str(self.upper),
            "exact": self.exact,
            "rules": list(self.rules),
            "annotations": list(self.annotations),
        }


def is_permutation_matrix(channel: Channel) -> bool:
    return permutation_of(channel) is not None


def erasure_structure(channel: Channel):
    """``(eta, erasure_column)`` if ``channel`` is a q-EC up to output-column order.

    The pattern is one constant column ``eta`` (0-based index returned) plus
    ``(1 - eta)`` times a ``q x q`` permutation matrix on the remaining
    columns. ``eta = 1`` is not recognised; that channel has unit rank.
    """
    m = channel.matrix
    q = channel.input_size
    if channel.output_size != q + 1:
        return None
    for e in range(q + 1):
        col = m[:, e]
        eta = float(col[0])
        if np.max(np.abs(col - eta)) > ENTRY_TOL or eta > 1.0 - ENTRY_TOL:
            continue
        rest = np.delete(m, e, axis=1) / (1.0 - eta)
        if permutation_of(Channel(rest)) is not None:
            return eta, e
    return None


def erasure_parameter(channel: Channel) -> float | None:
    found = erasure_structure(channel)
    return None if found is None else found[0]


def capacity_bounds(channel: Channel, profile: ChannelProfile | None = None) -> CapacityBounds:
    """Classify ``channel`` and return capacity bounds with the rules that produced them.

    Rule cascade: unit rank gives 0; a permutation matrix gives ``|X| - 1``;
    a strictly positive matrix gets ``[(r-1)/2, (min(ext, |Y|) - 1)/2]``;
    anything else gets ``[(r-1)/2, min(ext, |Y|) - 1]``. Erasure structure
    then refines the bounds to ``[(q-1)/2, q-1]`` (exact when ``eta = 0``).
    """
    if profile is None:
        profile = build_profile(channel)
    r = profile.rank_r
    q_in = channel.input_size
    width = min(profile.ext_count, channel.output_size)
    notes = []

    if r == 1:
        return CapacityBounds(Fraction(0), Fraction(0), True, ("unit-rank",))
    if is_permutation_matrix(channel):
        v = Fraction(q_in - 1)
        return CapacityBounds(v, v, True, ("permutation-matrix",))

    lower = Fraction(r - 1, 2)
    rules = ["rank-achievability"]
    if profile.strictly_positive:
        upper = Fraction(width - 1, 2)
        rules.append("strictly-positive-converse")
        exact = r == width
        if exact:
            rules.append("full-rank-exact")
        else:
            notes.append(f"conjectured value (r-1)/2 = {lower} for strictly positive channels")
        return CapacityBounds(lower, upper, exact, tuple(rules), tuple(notes))

    upper = Fraction(width - 1)
    rules.append("general-converse")
    exact = lower == upper
    eta = erasure_parameter(channel)
    if eta is not None:
        q = q_in
        rules.append("erasure-bounds")
        if eta <= ENTRY_TOL:
            lower = upper = Fraction(q - 1)
            exact = True
        else:
            lower, upper, exact = Fraction(q - 1, 2), Fraction(q - 1), False
            if q == 2:
                notes.append("conjectured value 1/2 for the binary erasure channel")
            else:
                notes.append(f"conjectured upper bound q/2 = {Fraction(q, 2)}")
    return CapacityBounds(lower, upper, exact, tuple(rules), tuple(notes))


def rate_of(message_count: int, n: int) -> float:
    """Rate ``log2 |M| / log2 n`` of a code with ``message_count`` messages."""
    if n < 2:
        raise ParameterOutOfRange("rate needs blocklength n >= 2")
    if message_count < 1:
        raise ParameterOutOfRange("message count must be positive")
    return math.log2(message_count) / math.log2(n)
