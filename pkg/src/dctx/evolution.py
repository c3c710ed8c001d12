"""Time evolution of decaying two-level particles.

Each particle lives in ``span{s1, s2}`` while it survives and is moved to a
decayed flag sector ``span{d1, d2}`` at rates ``gamma1``/``gamma2``. The
closed-form Kraus maps below are the production path; :func:`lindblad_oracle`
integrates the master equation on the extended space and is only used to
check them.

Basis convention: index 0 is the short-lived mass eigenstate (``gamma1``),
index 1 the long-lived one (``gamma2``). The surviving Hamiltonian is
``diag(delta_m, 0)``, which is the generator whose propagator carries the
relative phase of :func:`single_particle_kraus`.
"""
from dataclasses import dataclass, field
from itertools import product
from math import ceil

import numpy as np

from dctx.errors import DimensionMismatch, InvalidState, NegativeTime
from dctx.linalg import as_matrix, dag, tensor, validate_density_block, validate_state

MAX_PARTICLES = 3


@dataclass(frozen=True)
class DecayParams:
    """Per-particle constants in inverse-lifetime units (hbar = 1)."""

    gamma1: float
    gamma2: float
    delta_m: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 >= 0 and self.gamma2 >= 0):
            raise ValueError(f"decay rates must be nonnegative, got {self.gamma1}, {self.gamma2}")


#: Neutral kaons in units of the K_S width: Gamma_S ~ 2 dm ~ 600 Gamma_L.
KAON = DecayParams(gamma1=1.0, gamma2=1.0 / 600.0, delta_m=0.5)


@dataclass
class JointState:
    """Surviving block plus the total weight of the (single) decayed sector."""

    rho_s: np.ndarray
    decayed_weight: float
    time: float
    rho_d: np.ndarray | None = field(default=None, repr=False)

    @property
    def surviving_weight(self):
        return float(np.real(np.trace(self.rho_s)))


@dataclass
class SectorState:
    """Blocks of an n-particle state keyed by survival labels such as ``"sd"``."""

    n_particles: int
    times: tuple
    blocks: dict

    def trace(self, label):
        return float(np.real(np.trace(self.blocks[label])))

    def traces(self):
        return {label: self.trace(label) for label in self.blocks}

    def total_trace(self):
        return sum(self.traces().values())

    @property
    def surviving(self):
        return self.blocks["s" * self.n_particles]

    def validate(self, tol=1e-10):
        for label, block in self.blocks.items():
            try:
                validate_density_block(block, tol)
            except InvalidState as exc:
                raise InvalidState(f"sector {label}: {exc}") from None
        total = self.total_trace()
        if abs(total - 1.0) > tol:
            raise InvalidState(f"sector traces sum to {total:.12g}")
        return self


def sector_labels(n):
    return ["".join(p) for p in product("sd", repeat=n)]


def _check_time(t):
    if t < 0:
        raise NegativeTime(f"time must be nonnegative, got {t}")


def single_particle_kraus(p, t):
    """Return ``(K_s, K_d)`` for one particle after time ``t``.

    ``K_s = diag(exp(-(G1 + i dm) t/2), exp(-(G2 - i dm) t/2))`` and
    ``K_d = diag(sqrt(1 - exp(-G1 t)), sqrt(1 - exp(-G2 t)))``.
    """
    _check_time(t)
    k_s = np.diag([
        np.exp(-(p.gamma1 + 1j * p.delta_m) * t / 2),
        np.exp(-(p.gamma2 - 1j * p.delta_m) * t / 2),
    ])
    k_d = np.diag([
        np.sqrt(-np.expm1(-p.gamma1 * t)),
        np.sqrt(-np.expm1(-p.gamma2 * t)),
    ]).astype(complex)
    return k_s, k_d


def joint_two_particle_kraus(p, t):
    """Return ``(K_ss, K_dd)`` for a pair evolving jointly in one time.

    ``K_dd`` is diagonal in the product mass basis with entries
    ``sqrt(1 - exp(-g t))`` for ``g`` in ``(2 G1, G1 + G2, G1 + G2, 2 G2)``; it
    is not a tensor product of single-particle operators.
    """
    k_s, _ = single_particle_kraus(p, t)
    rates = np.array([2 * p.gamma1, p.gamma1 + p.gamma2, p.gamma1 + p.gamma2, 2 * p.gamma2])
    k_dd = np.diag(np.sqrt(-np.expm1(-rates * t))).astype(complex)
    return tensor(k_s, k_s), k_dd


def evolve_joint(rho0, p, t):
    rho0 = validate_state(rho0)
    if rho0.shape != (4, 4):
        raise DimensionMismatch(f"joint evolution needs a two-particle state, got {rho0.shape}")
    k_ss, k_dd = joint_two_particle_kraus(p, t)
    rho_s = k_ss @ rho0 @ dag(k_ss)
    rho_d = k_dd @ rho0 @ dag(k_dd)
    return JointState(rho_s=rho_s, decayed_weight=float(np.real(np.trace(rho_d))), time=float(t), rho_d=rho_d)


def _per_particle(params, n):
    if isinstance(params, DecayParams):
        return [params] * n
    params = list(params)
    if len(params) != n:
        raise DimensionMismatch(f"expected {n} parameter sets, got {len(params)}")
    return params


def _n_particles(rho0, base):
    dim = rho0.shape[0]
    n = int(round(np.log(dim) / np.log(base)))
    if base**n != dim or not 1 <= n <= MAX_PARTICLES:
        raise DimensionMismatch(f"dimension {dim} is not {base}^n with 1 <= n <= {MAX_PARTICLES}")
    return n


def evolve_sectors(rho0, params, times):
    """Independent per-particle evolution, each particle with its own time.

    Every label in ``{s, d}^n`` gets the block
    ``(K_l1(t1) x ... x K_ln(tn)) rho0 (...)^dagger``.
    """
    rho0 = validate_state(rho0)
    times = tuple(float(t) for t in np.atleast_1d(times))
    n = _n_particles(rho0, 2)
    if len(times) != n:
        raise DimensionMismatch(f"{n}-particle state needs {n} times, got {len(times)}")
    params = _per_particle(params, n)
    kraus = [dict(zip("sd", single_particle_kraus(p, t))) for p, t in zip(params, times)]
    blocks = {}
    for label in sector_labels(n):
        k = tensor(*(kraus[m][c] for m, c in enumerate(label)))
        blocks[label] = k @ rho0 @ dag(k)
    return SectorState(n_particles=n, times=times, blocks=blocks)


# ---------------------------------------------------------------------------
# Lindblad oracle


def _embed(op, site, n, d=4):
    ops = [np.eye(d, dtype=complex)] * n
    ops[site] = op
    return tensor(*ops)


def _local_ops(p):
    h = np.diag([p.delta_m, 0, 0, 0]).astype(complex)
    ell = np.zeros((4, 4), dtype=complex)
    ell[2, 0] = np.sqrt(p.gamma1)
    ell[3, 1] = np.sqrt(p.gamma2)
    return h, ell


def _extended_generators(params):
    """Hamiltonian and jump operators on ``(span{s1, s2, d1, d2})^{x n}``."""
    n = len(params)
    h = np.zeros((4**n, 4**n), dtype=complex)
    jumps = []
    for site, p in enumerate(params):
        h_loc, ell = _local_ops(p)
        h += _embed(h_loc, site, n)
        jumps.append(_embed(ell, site, n))
    return h, jumps


class _LocalRhs:
    """Master-equation right-hand side for independent particles.

    Same generator as :func:`lindblad_rhs` with the embedded operators, using
    that ``H - i/2 sum L^dagger L`` is diagonal in the extended product basis
    and that each particle's jump only moves ``s_k -> d_k`` on its own
    ket/bra axes.
    """

    def __init__(self, params):
        self.n = len(params)
        h, jumps = _extended_generators(params)
        h_eff = h - 0.5j * sum(dag(ell) @ ell for ell in jumps)
        assert np.allclose(h_eff, np.diag(np.diag(h_eff)))
        self.e = np.diag(h_eff)
        self.rates = [np.sqrt([p.gamma1, p.gamma2]) for p in params]

    def __call__(self, rho):
        n, d = self.n, 4**self.n
        out = -1j * (self.e[:, None] * rho - rho * self.e.conj()[None, :])
        shaped = rho.reshape((4,) * (2 * n))
        acc = out.reshape((4,) * (2 * n))
        for m, g in enumerate(self.rates):
            src = [slice(None)] * (2 * n)
            dst = [slice(None)] * (2 * n)
            src[m] = src[n + m] = slice(0, 2)
            dst[m] = dst[n + m] = slice(2, 4)
            weight = np.outer(g, g).reshape([2 if k in (m, n + m) else 1 for k in range(2 * n)])
            acc[tuple(dst)] += weight * shaped[tuple(src)]
        return out


def liouvillian(h, jumps):
    """Superoperator of the master equation acting on row-major ``vec(rho)``."""
    d = h.shape[0]
    eye = np.eye(d)
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for ell in jumps:
        ll = dag(ell) @ ell
        out += np.kron(ell, ell.conj()) - 0.5 * np.kron(ll, eye) - 0.5 * np.kron(eye, ll.T)
    return out


def lindblad_rhs(rho, h, jumps):
    out = -1j * (h @ rho - rho @ h)
    for ell in jumps:
        ell_d = dag(ell)
        ll = ell_d @ ell
        out += ell @ rho @ ell_d - 0.5 * (ll @ rho + rho @ ll)
    return out


def default_steps(t):
    return max(1, ceil(20000 * t))


def rk4_step_matrix(h, jumps, dt):
    """One classical RK4 step for the linear generator, as a superoperator.

    For ``d rho/dt = L rho`` with constant ``L`` the four RK4 stages collapse
    to ``sum_{k<=4} (dt L)^k / k!``.
    """
    gen = dt * liouvillian(h, jumps)
    d2 = gen.shape[0]
    step = np.eye(d2, dtype=complex)
    term = np.eye(d2, dtype=complex)
    for k in range(1, 5):
        term = term @ gen / k
        step = step + term
    return step


def rk4_propagate(rho, rhs, t, n_steps, step_matrix=None):
    """Fixed-step RK4 from 0 to ``t``.

    With ``step_matrix`` given (small spaces) the step is applied as
    ``step_matrix ** n_steps``; otherwise the four stages are evaluated with
    ``rhs`` on the density matrix.
    """
    if t == 0:
        return rho.copy()
    d = rho.shape[0]
    if step_matrix is not None:
        return (np.linalg.matrix_power(step_matrix, n_steps) @ rho.reshape(-1)).reshape(d, d)
    dt = t / n_steps
    for _ in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + dt / 2 * k1)
        k3 = rhs(rho + dt / 2 * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def _extract_sectors(rho_ext, n):
    shaped = rho_ext.reshape((4,) * (2 * n))
    cut = {"s": slice(0, 2), "d": slice(2, 4)}
    blocks = {}
    for label in sector_labels(n):
        idx = tuple(cut[c] for c in label) * 2
        blocks[label] = shaped[idx].reshape(2**n, 2**n)
    return blocks


def lindblad_oracle(rho0, params, t, n_steps=None):
    """Integrate the master equation for ``n`` independently decaying particles.

    All particles share the single time ``t``. Each particle contributes the
    Hamiltonian ``diag(delta_m, 0, 0, 0)`` and one jump operator
    ``sqrt(G1)|d1><s1| + sqrt(G2)|d2><s2|`` on its extended four-level space.

    Returns:
        SectorState: blocks read off the extended density matrix.
    """
    rho0 = as_matrix(rho0)
    n = _n_particles(rho0, 2)
    _check_time(t)
    params = _per_particle(params, n)
    n_steps = default_steps(t) if n_steps is None else int(n_steps)

    keep = np.array([0, 1])
    idx = np.ravel_multi_index(np.meshgrid(*([keep] * n), indexing="ij"), (4,) * n).ravel()
    rho_ext = np.zeros((4**n, 4**n), dtype=complex)
    rho_ext[np.ix_(idx, idx)] = rho0

    if n <= 2:
        h, jumps = _extended_generators(params)
        step = rk4_step_matrix(h, jumps, t / n_steps) if t > 0 else None
        rho_t = rk4_propagate(rho_ext, None, t, n_steps, step)
    else:
        rho_t = rk4_propagate(rho_ext, _LocalRhs(params), t, n_steps)
    return SectorState(n_particles=n, times=(float(t),) * n, blocks=_extract_sectors(rho_t, n))


def lindblad_oracle_joint(rho0, p, t, n_steps=None):
    """Integrate the joint-particle master equation for a pair.

    The extended space is ``span{s} x C^4  +  span{d} x C^4`` with
    ``H = |s><s| x (h x 1 + 1 x h)`` and one jump operator ``|d><s| x L``,
    ``L^dagger L = diag(2 G1, G1 + G2, G1 + G2, 2 G2)``.
    """
    rho0 = as_matrix(rho0)
    if rho0.shape != (4, 4):
        raise DimensionMismatch("joint oracle needs a two-particle state")
    _check_time(t)
    n_steps = default_steps(t) if n_steps is None else int(n_steps)
    h1 = np.diag([p.delta_m, 0.0]).astype(complex)
    h_pair = tensor(h1, np.eye(2)) + tensor(np.eye(2), h1)
    rates = np.array([2 * p.gamma1, p.gamma1 + p.gamma2, p.gamma1 + p.gamma2, 2 * p.gamma2])
    flag_s = np.diag([1.0, 0.0]).astype(complex)
    flip = np.array([[0, 0], [1, 0]], dtype=complex)  # |d><s|
    h = tensor(flag_s, h_pair)
    jump = tensor(flip, np.diag(np.sqrt(rates)).astype(complex))
    rho_ext = np.zeros((8, 8), dtype=complex)
    rho_ext[:4, :4] = rho0
    step = rk4_step_matrix(h, [jump], t / n_steps) if t > 0 else None
    rho_t = rk4_propagate(rho_ext, None, t, n_steps, step)
    rho_d = rho_t[4:, 4:]
    return JointState(
        rho_s=rho_t[:4, :4],
        decayed_weight=float(np.real(np.trace(rho_d))),
        time=float(t),
        rho_d=rho_d,
    )
