"""Evaluators for the decay-modified contextuality and Bell criteria."""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from dctx.errors import DimensionMismatch, OutOfRange
from dctx.evolution import SectorState, JointState
from dctx.linalg import I2, PAULIS, as_matrix, check_projector, dag, tensor, validate_state
from dctx.observables import SQUARE_PARITIES, dress_local, effect_local

KCBS_CLASSICAL = -3.0
KCBS_QUANTUM = 5 - 4 * np.sqrt(5)
MP_CLASSICAL = 4.0
MERMIN3_CLASSICAL = 3.0
CHSH_CLASSICAL = 2.0


@dataclass
class CriterionResult:
    """A criterion value together with the bound it is tested against.

    ``bound_side`` is ``"lower"`` (violated below the bound), ``"upper"``
    (violated above) or ``"two_sided"`` (violated when ``|value|`` exceeds it,
    as for CHSH).
    """

    value: float
    classical_bound: float
    bound_side: str
    surviving_weight: float = 1.0
    violated: bool = field(init=False)

    def __post_init__(self):
        self.value = float(self.value)
        self.classical_bound = float(self.classical_bound)
        if self.bound_side == "lower":
            self.violated = self.value < self.classical_bound
        elif self.bound_side == "upper":
            self.violated = self.value > self.classical_bound
        elif self.bound_side == "two_sided":
            self.violated = abs(self.value) > self.classical_bound
        else:
            raise ValueError(f"unknown bound side {self.bound_side!r}")


def _check_signs(signs, n):
    signs = tuple(int(s) for s in np.ravel(signs))
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise ValueError(f"expected {n} signs in {{+1, -1}}, got {signs}")
    return signs


def _kcbs_sum(pg, rho):
    if rho.shape != (pg.dim, pg.dim):
        raise DimensionMismatch(f"pentagram dim {pg.dim} vs state shape {rho.shape}")
    obs = pg.observables()
    return float(sum(np.real(np.trace(obs[i] @ obs[(i + 1) % 5] @ rho)) for i in range(5)))


def kcbs_value(pg, rho):
    """``sum_i tr(O_i O_{i+1} rho)`` with ``O_i = 2|v_i><v_i| - 1``; classically ``>= -3``."""
    return _kcbs_sum(pg, validate_state(rho))


def cycle_coefficient(signs):
    """``c = sum_i s_i s_{i+1 mod n}`` for the signs given to the decayed outcome."""
    s = np.asarray(signs)
    return int(np.sum(s * np.roll(s, -1)))


def kcbs_decay_value(pg, signs, js):
    """KCBS on the surviving block plus ``c * (1 - tr rho_s)``; bound ``-3`` from below."""
    signs = _check_signs(signs, 5)
    rho_s = as_matrix(js.rho_s)
    value = _kcbs_sum(pg, rho_s) + cycle_coefficient(signs) * js.decayed_weight
    return CriterionResult(value, KCBS_CLASSICAL, "lower", js.surviving_weight)


def optimal_cycle_signs(n):
    """Brute-force the sign pattern minimizing the cyclic coefficient.

    Returns the lexicographically lowest minimizer (with ``-1 < +1``) and
    the minimum itself.
    """
    if not 3 <= n <= 20:
        raise OutOfRange(f"cycle length must be in [3, 20], got {n}")
    best, best_c = None, None
    for signs in product((-1, 1), repeat=n):
        c = cycle_coefficient(signs)
        if best_c is None or c < best_c:
            best, best_c = signs, c
    return best, best_c


def mp_decay_closed_form(surviving_trace, tol=1e-10):
    """``2 tr rho_s + 4`` against the classical bound 4."""
    if not -tol <= surviving_trace <= 1.0 + tol:
        raise OutOfRange(f"surviving trace {surviving_trace} outside [0, 1]")
    surviving_trace = min(max(surviving_trace, 0.0), 1.0)
    return CriterionResult(2 * surviving_trace + 4, MP_CLASSICAL, "upper", surviving_trace)


def mp_decayed_coefficient(signs, parities=SQUARE_PARITIES):
    """Weight of ``1 - tr rho_s`` in the square for a 3x3 (row-major) sign grid.

    Each context contributes the product of its three decayed signs, times
    the parity with which that context enters the criterion (``-1`` for the
    third row of the canonical square).
    """
    s = np.reshape(_check_signs(signs, 9), (3, 3))
    ctx = np.concatenate([np.prod(s, axis=1), np.prod(s, axis=0)])
    return int(np.dot(parities, ctx))


def mp_optimal_signs(parities=SQUARE_PARITIES):
    """Exhaustive search over the 512 assignments; lowest lexicographic maximizer."""
    best, best_c = None, None
    for signs in product((-1, 1), repeat=9):
        c = mp_decayed_coefficient(signs, parities)
        if best_c is None or c > best_c:
            best, best_c = signs, c
    return best, best_c


def mp_decay_generic(square, signs, js):
    signs = _check_signs(signs, 9)
    rho_s = as_matrix(js.rho_s)
    if rho_s.shape != (4, 4):
        raise DimensionMismatch("the magic square acts on two qubits")
    total = 0.0
    for ctx, parity in square.contexts():
        total += parity * np.real(np.trace(ctx[0] @ ctx[1] @ ctx[2] @ rho_s))
    total += mp_decayed_coefficient(signs, square.parities()) * js.decayed_weight
    return CriterionResult(total, MP_CLASSICAL, "upper", js.surviving_weight)


def mermin3_decay(st):
    """``3 + 2 (tr rho_sss + tr rho_sds + tr rho_dsd)``, bounded by 3 from above."""
    if not isinstance(st, SectorState) or st.n_particles != 3:
        raise DimensionMismatch("three-particle sector state required")
    value = 3 + 2 * (st.trace("sss") + st.trace("sds") + st.trace("dsd"))
    return CriterionResult(value, MERMIN3_CLASSICAL, "upper", st.trace("sss"))


# ---------------------------------------------------------------------------
# CHSH


def bell_operator(a, a2, b, b2):
    return tensor(a, b) + tensor(a, b2) + tensor(a2, b) - tensor(a2, b2)


def chsh_from_projectors(settings):
    """Bell operator from four local projectors ``(Pa, Pa', Pb, Pb')``."""
    a, a2, b, b2 = (2 * check_projector(p) - I2 for p in settings)
    return bell_operator(a, a2, b, b2)


def chsh_renormalized(settings, js):
    """``tr(Bell rho_ss)`` against the rescaled bound ``2 tr rho_ss``.

    Decayed pairs are not part of the measured ensemble.
    """
    rho_s = as_matrix(js.rho_s)
    if rho_s.shape != (4, 4):
        raise DimensionMismatch("CHSH acts on two qubits")
    w = js.surviving_weight
    value = np.real(np.trace(chsh_from_projectors(settings) @ rho_s))
    return CriterionResult(value, CHSH_CLASSICAL * w, "two_sided", w)


def correlation_matrix(rho):
    return np.array([[np.real(np.trace(tensor(si, sj) @ rho)) for sj in PAULIS] for si in PAULIS])


def horodecki_max(rho):
    """Maximal CHSH value ``2 sqrt(m1 + m2)``, ``m1 >= m2`` the top eigenvalues of ``T^T T``."""
    rho = validate_state(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatch("two-qubit state required")
    t = correlation_matrix(rho)
    m = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return float(2 * np.sqrt(max(m[0] + m[1], 0.0)))


def dynamical_chsh(pa, pa2, pb, pb2, signs, params, t_l, t_r, rho0, form="product", t_l2=None, t_r2=None):
    """CHSH with decay absorbed into time-dependent local observables.

    ``form="product"`` correlates local dressed observables ``D_l x D_r``.
    ``form="joint"`` uses ``2 E_l x E_r - 1`` per term, where ``E`` counts a
    decay as YES; the signs are ignored there. The primed settings may be
    taken at other times via ``t_l2``/``t_r2`` (default: the unprimed ones).
    """
    rho0 = validate_state(rho0)
    signs = _check_signs(signs, 4)
    t_l2 = t_l if t_l2 is None else t_l2
    t_r2 = t_r if t_r2 is None else t_r2
    if form == "product":
        da = dress_local(pa, params, t_l, signs[0]).matrix
        da2 = dress_local(pa2, params, t_l2, signs[1]).matrix
        db = dress_local(pb, params, t_r, signs[2]).matrix
        db2 = dress_local(pb2, params, t_r2, signs[3]).matrix
        op = bell_operator(da, da2, db, db2)
    elif form == "joint":
        ea, ea2 = effect_local(pa, params, t_l), effect_local(pa2, params, t_l2)
        eb, eb2 = effect_local(pb, params, t_r), effect_local(pb2, params, t_r2)
        eye = np.eye(4)
        op = (2 * tensor(ea, eb) - eye) + (2 * tensor(ea, eb2) - eye) \
            + (2 * tensor(ea2, eb) - eye) - (2 * tensor(ea2, eb2) - eye)
    else:
        raise ValueError(f"unknown form {form!r}")
    value = np.real(np.trace(op @ rho0))
    return CriterionResult(value, CHSH_CLASSICAL, "two_sided", 1.0)
