"""Preset initial states in the mass basis (|1> = K_S, |2> = K_L)."""
from dataclasses import dataclass

import numpy as np

from dctx.evolution import KAON, DecayParams
from dctx.linalg import projector, validate_state

_S = 1 / np.sqrt(2)

STATE_VECTORS = {
    "psi-plus": np.array([0, _S, _S, 0], dtype=complex),
    "psi-minus": np.array([0, _S, -_S, 0], dtype=complex),
    "phi-plus": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-minus": np.array([_S, 0, 0, -_S], dtype=complex),
    "ghz": np.array([_S, 0, 0, 0, 0, 0, 0, _S], dtype=complex),
}

BELL_LABELS = ("psi-plus", "psi-minus", "phi-plus", "phi-minus")


def state(label):
    return projector(STATE_VECTORS[label])


@dataclass
class Scenario:
    name: str
    params: DecayParams
    initial_state: np.ndarray
    state_label: str

    def __post_init__(self):
        validate_state(self.initial_state)


def kaon_scenario(label="psi-minus"):
    return Scenario(name=f"kaon/{label}", params=KAON, initial_state=state(label), state_label=label)
