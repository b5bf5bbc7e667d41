"""Noisy permutation channels: simulation, coding, capacity bounds and exact oracles."""

from permchan.capacity import CapacityBounds, capacity_bounds, rate_of
from permchan.channel import (Channel, Codeword, DistVector, Histogram, bsc, empirical_distribution,
                              erasure, identity, load_channel, make_canonical, symmetric, transmit,
                              validate_channel)
from permchan.coding import (CodeConfig, LatticeMessage, MessageLattice, decode_erasure_symmetrized,
                             decode_ml_lattice, decode_permutation_channel, decode_threshold,
                             encode_composition, encode_randomized, message_lattice)
from permchan.degradation import (degradation_feasibility, doeblin_witness,
                                  extremal_erasure_probability, symmetric_dominator)
from permchan.kernels import BACKEND
from permchan.matrix import ChannelProfile, build_profile, extreme_rows, numerical_rank

__version__ = "0.1.0"
