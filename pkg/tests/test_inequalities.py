import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dctx import evolution as ev
from dctx.errors import DimensionMismatch, OutOfRange
from dctx.evolution import KAON, JointState
from dctx.inequalities import (
    KCBS_QUANTUM, CriterionResult, chsh_from_projectors, chsh_renormalized, cycle_coefficient,
    dynamical_chsh, horodecki_max, kcbs_decay_value, kcbs_value, mermin3_decay,
    mp_decay_closed_form, mp_decay_generic, mp_decayed_coefficient, mp_optimal_signs,
    optimal_cycle_signs,
)
from dctx.linalg import I2, PAULIS, projector, tensor
from dctx.observables import Pentagram, STRANGENESS, bloch_projector, kcbs_optimal_qutrit, magic_square, random_pentagram
from dctx.optimizer import chsh_optimal_settings, tsirelson_settings
from dctx.scenarios import BELL_LABELS, state

from conftest import random_mixed, random_pure

ALT = (1, -1, 1, -1, 1)


def test_criterion_result_violation_flag():
    assert CriterionResult(-3.1, -3, "lower").violated
    assert not CriterionResult(-3.0, -3, "lower").violated
    assert CriterionResult(4.5, 4, "upper").violated
    assert CriterionResult(-2.5, 2, "two_sided").violated
    with pytest.raises(ValueError):
        CriterionResult(0, 0, "sideways")


# --- KCBS ------------------------------------------------------------------


def test_kcbs_optimal_qutrit_value():
    pg, psi = kcbs_optimal_qutrit()
    assert abs(kcbs_value(pg, projector(psi)) - (5 - 4 * np.sqrt(5))) < 1e-9
    assert abs(kcbs_value(pg, projector(psi)) - (-3.94427)) < 1e-5


def test_kcbs_maximally_mixed_qutrit():
    for seed in range(5):
        assert abs(kcbs_value(random_pentagram(3, seed), np.eye(3) / 3) + 5 / 3) < 1e-12


def test_kcbs_degenerate_pentagram_by_hand():
    e = np.eye(3)
    pg = Pentagram(np.array([e[0], e[1], e[0], e[1], e[2]]))
    # on |e3>: O1..O5 -> -1, -1, -1, -1, +1; products +1 +1 +1 -1 -1
    assert abs(kcbs_value(pg, projector(e[2])) - 1.0) < 1e-12


def test_kcbs_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        kcbs_value(random_pentagram(3, 0), np.eye(4) / 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 5), st.integers(0, 2**32 - 1))
def test_kcbs_quantum_lower_bound(dim, seed):
    rng = np.random.default_rng(seed)
    pg = random_pentagram(dim, seed)
    assert kcbs_value(pg, random_mixed(dim, rng)) >= KCBS_QUANTUM - 1e-9


def test_kcbs_decay_reductions():
    pg, psi = kcbs_optimal_qutrit()
    rho = projector(psi)
    stable = JointState(rho_s=rho, decayed_weight=0.0, time=0.0)
    assert abs(kcbs_decay_value(pg, ALT, stable).value - kcbs_value(pg, rho)) < 1e-12
    gone = JointState(rho_s=np.zeros((3, 3)), decayed_weight=1.0, time=50.0)
    res = kcbs_decay_value(pg, ALT, gone)
    assert res.value == -3 and not res.violated


def test_kcbs_decay_psi_minus_closed_form():
    # optimal pentagram around psi-: embed the qutrit optimum in span{psi-, e1, e4}
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    basis = np.array([[1, 0, 0, 0], [0, 0, 0, 1], psi]).T
    qpg, _ = kcbs_optimal_qutrit()
    pg = Pentagram(qpg.vectors @ basis.T)
    js = ev.evolve_joint(projector(psi), KAON, 1.0)
    expected = -3 - (4 * np.sqrt(5) - 8) * np.exp(-(KAON.gamma1 + KAON.gamma2))
    res = kcbs_decay_value(pg, ALT, js)
    assert abs(res.value - expected) < 1e-12 and res.violated


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 10))
def test_kcbs_sign_modes_differ_by_eight_decayed(seed, t):
    rng = np.random.default_rng(seed)
    js = ev.evolve_joint(random_pure(4, rng), KAON, t)
    pg = random_pentagram(4, seed)
    opt = kcbs_decay_value(pg, ALT, js).value
    naive = kcbs_decay_value(pg, (-1,) * 5, js).value
    assert abs(naive - opt - 8 * js.decayed_weight) < 1e-10


@pytest.mark.parametrize("n, c", [(3, -1), (4, -4), (5, -3), (6, -6), (7, -5)])
def test_optimal_cycle_signs(n, c):
    signs, c_min = optimal_cycle_signs(n)
    # independent brute force
    brute = min(sum(s[i] * s[(i + 1) % n] for i in range(n)) for s in itertools.product((-1, 1), repeat=n))
    assert c_min == brute == c
    assert cycle_coefficient(signs) == c_min


def test_optimal_cycle_signs_lexicographic_tie_break():
    signs, _ = optimal_cycle_signs(5)
    assert signs == (-1, -1, 1, -1, 1)


def test_optimal_cycle_signs_range():
    with pytest.raises(OutOfRange):
        optimal_cycle_signs(2)


# --- Mermin-Peres ----------------------------------------------------------


@pytest.mark.parametrize("s, value, violated", [(1.0, 6, True), (0.0, 4, False), (0.5, 5, True)])
def test_mp_closed_form(s, value, violated):
    res = mp_decay_closed_form(s)
    assert res.value == value and res.violated == violated


def test_mp_closed_form_range():
    with pytest.raises(OutOfRange):
        mp_decay_closed_form(1.5)


def test_mp_sign_brute_force():
    sq = magic_square()
    # independent brute force straight from the operator grid
    best = -99
    for s in itertools.product((-1, 1), repeat=9):
        g = np.reshape(s, (3, 3))
        rows = [g[r].prod() for r in range(3)]
        cols = [g[:, c].prod() for c in range(3)]
        total = sum(p * v for p, v in zip(sq.parities(), rows + cols))
        best = max(best, total)
    signs, c = mp_optimal_signs()
    assert best == c == 4
    assert mp_decayed_coefficient(signs) == 4


def test_mp_generic_stable_is_six(rng):
    sq = magic_square()
    signs, _ = mp_optimal_signs()
    for _ in range(5):
        js = JointState(rho_s=random_mixed(4, rng), decayed_weight=0.0, time=0.0)
        assert abs(mp_decay_generic(sq, signs, js).value - 6) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 20))
def test_mp_generic_matches_closed_form(seed, t):
    sq = magic_square()
    signs, _ = mp_optimal_signs()
    js = ev.evolve_joint(random_pure(4, np.random.default_rng(seed)), KAON, t)
    res = mp_decay_generic(sq, signs, js)
    assert abs(res.value - mp_decay_closed_form(js.surviving_weight).value) < 1e-10


# --- three qubits ----------------------------------------------------------


def test_mermin3_limits():
    ghz = state("ghz")
    assert mermin3_decay(ev.evolve_sectors(ghz, KAON, (0, 0, 0))).value == 5
    late = mermin3_decay(ev.evolve_sectors(ghz, ev.DecayParams(1.0, 1.0, 0.5), (100, 100, 100)))
    assert abs(late.value - 3) < 1e-6 and late.value >= 3


def test_mermin3_requires_three_particles():
    with pytest.raises(DimensionMismatch):
        mermin3_decay(ev.evolve_sectors(state("psi-minus"), KAON, (1, 1)))


# --- CHSH ------------------------------------------------------------------


def _brute_force_chsh(rho, steps=32):
    """Max CHSH over settings in the x-z plane on an angle grid (exact for
    states whose correlation matrix is isotropic or x-z diagonal)."""
    angles = np.linspace(0, 2 * np.pi, steps, endpoint=False)
    obs = [np.cos(a) * PAULIS[2] + np.sin(a) * PAULIS[0] for a in angles]
    e = np.array([[np.trace(tensor(a, b) @ rho).real for b in obs] for a in obs])
    val = (e[:, None, :, None] + e[:, None, None, :] + e[None, :, :, None] - e[None, :, None, :])
    return np.abs(val).max()


def test_horodecki_known_values():
    assert abs(horodecki_max(state("psi-minus")) - 2 * np.sqrt(2)) < 1e-12
    assert abs(horodecki_max(projector([1, 0, 0, 0])) - 2) < 1e-12


def test_horodecki_werner_against_brute_force():
    p = 0.9
    werner = p * state("psi-minus") + (1 - p) * np.eye(4) / 4
    brute = _brute_force_chsh(werner)
    assert abs(horodecki_max(werner) - brute) < 1e-9
    assert abs(brute - 2 * np.sqrt(2) * 0.9) < 1e-9
    assert abs(horodecki_max(werner) - 2.54558) < 1e-5


@pytest.mark.parametrize("label", BELL_LABELS)
def test_chsh_optimal_settings_reach_horodecki(label):
    settings_, value = chsh_optimal_settings(state(label))
    assert abs(value - 2 * np.sqrt(2)) < 1e-9


def test_chsh_optimal_settings_product_and_mixed(rng):
    _, value = chsh_optimal_settings(projector([0, 0, 0, 1]))
    assert abs(value - 2) < 1e-9
    for _ in range(10):
        rho = random_mixed(4, rng, rank=2)
        _, value = chsh_optimal_settings(rho)
        assert abs(value - horodecki_max(rho)) < 1e-9


def test_chsh_renormalized_psi_minus():
    settings_ = tsirelson_settings()
    res0 = chsh_renormalized(settings_, ev.evolve_joint(state("psi-minus"), KAON, 0.0))
    assert abs(res0.value - 2 * np.sqrt(2)) < 1e-12
    for t in (0.5, 3.0, 10.0):
        js = ev.evolve_joint(state("psi-minus"), KAON, t)
        res = chsh_renormalized(settings_, js)
        w = np.exp(-(KAON.gamma1 + KAON.gamma2) * t)
        assert abs(res.value - 2 * np.sqrt(2) * w) < 1e-12
        assert res.classical_bound == pytest.approx(2 * w, abs=1e-14)
        assert res.violated


def test_chsh_renormalized_product_state_never_violates(rng):
    rho = projector([1, 0, 0, 0])
    for t in (0.0, 1.0, 4.0):
        js = ev.evolve_joint(rho, KAON, t)
        for _ in range(20):
            ps = [bloch_projector(*rng.uniform(0, np.pi, 2)) for _ in range(4)]
            res = chsh_renormalized(ps, js)
            assert abs(res.value) <= 2 * js.surviving_weight + 1e-12 and not res.violated


def test_chsh_renormalization_invariance():
    js = ev.evolve_joint(state("phi-plus"), KAON, 1.0)
    w = js.surviving_weight
    settings_, value = chsh_optimal_settings(js.rho_s / w)
    assert abs(chsh_renormalized(settings_, js).value / w - value) < 1e-12


def test_dynamical_chsh_reduces_to_standard_at_zero(rng):
    rho0 = random_mixed(4, rng)
    ps = [bloch_projector(*rng.uniform(0, np.pi, 2)) for _ in range(4)]
    standard = np.trace(chsh_from_projectors(ps) @ rho0).real
    for signs in ((1, 1, 1, 1), (1, -1, -1, 1)):
        res = dynamical_chsh(*ps, signs, KAON, 0.0, 0.0, rho0)
        assert abs(res.value - standard) < 1e-12
    # the joint-YES form dichotomizes each pair as 2 Pa x Pb - 1 instead
    eye = np.eye(4)
    pa, pa2, pb, pb2 = ps
    joint_op = (2 * tensor(pa, pb) - eye) + (2 * tensor(pa, pb2) - eye) + (2 * tensor(pa2, pb) - eye) \
        - (2 * tensor(pa2, pb2) - eye)
    joint = dynamical_chsh(*ps, (1,) * 4, KAON, 0, 0, rho0, form="joint").value
    assert abs(joint - np.trace(joint_op @ rho0).real) < 1e-12


def test_dynamical_chsh_joint_form_expands():
    # 2 E_l x E_r - 1 with E = K_s^+ P K_s + K_d^+ K_d equals the printed sum over sectors
    p = STRANGENESS
    t_l, t_r = 0.7, 1.9
    rho0 = state("psi-minus")
    ks_l, kd_l = ev.single_particle_kraus(KAON, t_l)
    ks_r, kd_r = ev.single_particle_kraus(KAON, t_r)
    k_l, k_r = {"s": ks_l, "d": kd_l}, {"s": ks_r, "d": kd_r}
    pj = {"s": p, "d": I2}
    term = sum(
        2 * tensor(k_l[j].conj().T @ pj[j] @ k_l[j], k_r[k].conj().T @ pj[k] @ k_r[k])
        - tensor(k_l[j].conj().T @ k_l[j], k_r[k].conj().T @ k_r[k])
        for j in "sd" for k in "sd"
    )
    single = np.trace(term @ rho0).real
    res = dynamical_chsh(p, p, p, p, (1,) * 4, KAON, t_l, t_r, rho0, form="joint")
    # three terms with a plus sign and one with a minus: 2 * single
    assert abs(res.value - 2 * single) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 5))
def test_evaluators_linear_in_state(seed, lam, t):
    rng = np.random.default_rng(seed)
    r1, r2 = random_mixed(4, rng), random_mixed(4, rng)
    mix = lam * r1 + (1 - lam) * r2
    pg = random_pentagram(4, seed)
    assert abs(kcbs_value(pg, mix) - lam * kcbs_value(pg, r1) - (1 - lam) * kcbs_value(pg, r2)) < 1e-10
    j1, j2, jm = (ev.evolve_joint(r, KAON, t) for r in (r1, r2, mix))
    for f in (
        lambda js: kcbs_decay_value(pg, ALT, js).value,
        lambda js: mp_decay_generic(magic_square(), mp_optimal_signs()[0], js).value,
        lambda js: chsh_renormalized(tsirelson_settings(), js).value,
    ):
        assert abs(f(jm) - lam * f(j1) - (1 - lam) * f(j2)) < 1e-10
    dyn = [dynamical_chsh(STRANGENESS, STRANGENESS, STRANGENESS, STRANGENESS, (1, -1, 1, -1), KAON, t, 0.5, r).value
           for r in (r1, r2, mix)]
    assert abs(dyn[2] - lam * dyn[0] - (1 - lam) * dyn[1]) < 1e-10
