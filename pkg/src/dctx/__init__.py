"""Decaying multipartite two-level systems: Kraus/Lindblad evolution and
decay-modified contextuality and Bell criteria."""

from dctx.errors import (
    DctxError,
    DegenerateConfiguration,
    DimensionMismatch,
    InvalidState,
    NegativeTime,
    NotAProjector,
    NotHermitian,
    OutOfRange,
)
from dctx.evolution import (
    DecayParams,
    JointState,
    SectorState,
    KAON,
    evolve_joint,
    evolve_sectors,
    joint_two_particle_kraus,
    lindblad_oracle,
    lindblad_oracle_joint,
    single_particle_kraus,
)
from dctx.observables import (
    MagicSquare,
    Pentagram,
    DressedObservable,
    dress_local,
    kcbs_optimal_qutrit,
    magic_square,
    random_pentagram,
)
from dctx.inequalities import (
    CriterionResult,
    chsh_renormalized,
    dynamical_chsh,
    horodecki_max,
    kcbs_decay_value,
    kcbs_value,
    mermin3_decay,
    mp_decay_closed_form,
    mp_decay_generic,
    optimal_cycle_signs,
)
from dctx.optimizer import (
    OptimizerConfig,
    chsh_optimal_settings,
    kcbs_sweep,
    optimize_pentagram,
)

__version__ = "0.1.0"
