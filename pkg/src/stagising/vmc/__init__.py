"""Variational Monte Carlo for the s = 1/2 chain.

Spins live in the S^x eigenbasis (sigma = +-1, S^x = sigma/2), where the
interactions and the longitudinal field are diagonal and the transverse
field contributes the only off-diagonal local-energy term.  Amplitudes are
real and positive (the ground state is stoquastic for omega_z > 0), so all
ansatz log-amplitudes and parameters are real.
"""

from .ansatz import Ansatz, LookupTableAnsatz, MeanFieldAnsatz, RbmAnsatz
from .sampler import SampleBatch, sample_chains
from .sr import sr_update
from .train import (TrainConfig, TrainResult, local_energy, staggered_m2,
                    train, train_restarts)

__all__ = [
    "Ansatz", "MeanFieldAnsatz", "RbmAnsatz", "LookupTableAnsatz",
    "SampleBatch", "sample_chains", "sr_update",
    "TrainConfig", "TrainResult", "local_energy", "staggered_m2",
    "train", "train_restarts",
]
