"""Invariant checks behind ``dctx validate``.

Each suite yields ``(name, residual, limit)`` triples; ``limit=None`` marks an
informational number that is reported but not checked.
"""
import numpy as np

from dctx import evolution as ev
from dctx.inequalities import mp_optimal_signs, optimal_cycle_signs
from dctx.linalg import dag, projector
from dctx.observables import magic_square


def _param_grid(n, seed=0):
    rng = np.random.default_rng(seed)
    yield ev.KAON
    for _ in range(n - 1):
        yield ev.DecayParams(rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(-2, 2))


def _random_pure(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return projector(v / np.linalg.norm(v))


def kraus():
    single = joint = 0.0
    rng = np.random.default_rng(1)
    for p in _param_grid(25):
        for t in (0.0, *rng.uniform(0, 10, 3)):
            ks, kd = ev.single_particle_kraus(p, t)
            single = max(single, np.abs(dag(ks) @ ks + dag(kd) @ kd - np.eye(2)).max())
            kss, kdd = ev.joint_two_particle_kraus(p, t)
            joint = max(joint, np.abs(dag(kss) @ kss + dag(kdd) @ kdd - np.eye(4)).max())
    return [
        ("kraus_completeness_single", single, 1e-12),
        ("kraus_completeness_joint", joint, 1e-12),
    ]


def lindblad(times=(0.5, 2.0), n_params=3):
    """Closed-form Kraus evolution against RK4 integration of the master equation.

    Checked: the joint surviving block and decayed weight, every surviving
    sector block, every sector trace and the decayed-sector populations.
    The coherences inside decayed sectors are reported only; the closed-form
    decay operator does not carry them.
    """
    rng = np.random.default_rng(2)
    joint = acc = coh = 0.0
    for p in _param_grid(n_params, seed=3):
        for n in (1, 2):
            rho0 = _random_pure(2**n, rng)
            for t in times:
                kr = ev.evolve_sectors(rho0, p, (t,) * n)
                od = ev.lindblad_oracle(rho0, p, t)
                for label in kr.blocks:
                    diff = np.abs(kr.blocks[label] - od.blocks[label])
                    if "d" in label:
                        acc = max(acc, np.diag(diff).max())
                        coh = max(coh, diff.max())
                    else:
                        acc = max(acc, diff.max())
                if n == 2:
                    kj = ev.evolve_joint(rho0, p, t)
                    oj = ev.lindblad_oracle_joint(rho0, p, t)
                    joint = max(joint, np.abs(kj.rho_s - oj.rho_s).max(), abs(kj.decayed_weight - oj.decayed_weight))
    return [
        ("lindblad_joint_max_dev", joint, 1e-8),
        ("lindblad_sector_max_dev", acc, 1e-8),
        ("lindblad_decayed_coherence_dev", coh, None),
    ]


def signs():
    _, c5 = optimal_cycle_signs(5)
    _, mp_max = mp_optimal_signs()
    return [
        ("c_min(5)_=_-3", abs(c5 - (-3)), 0.5),
        ("mp_sign_max_=_4", abs(mp_max - 4), 0.5),
    ]


def square():
    return [("magic_square_invariants", magic_square().check(), 1e-12)]
