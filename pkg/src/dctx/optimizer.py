"""Per-time optimization of KCBS pentagrams and CHSH settings."""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from dctx.errors import DegenerateConfiguration, DimensionMismatch
from dctx.evolution import evolve_joint
from dctx.inequalities import (
    CriterionResult,
    _kcbs_sum,
    chsh_from_projectors,
    correlation_matrix,
    kcbs_decay_value,
    optimal_cycle_signs,
)
from dctx.linalg import as_matrix, validate_density_block, validate_state
from dctx.observables import Pentagram, close_pentagram, direction_projector, random_pentagram

_CYCLE = np.arange(5)
_NEXT = (_CYCLE + 1) % 5


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iterations: int = 2000
    penalty_weight: float = 1e4
    tolerance: float = 1e-9
    seed: int = 0
    mode: str = "complex"  # or "real"
    polish: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.mode not in ("complex", "real"):
            raise ValueError(f"unknown mode {self.mode!r}")


class _PenalizedKcbs:
    """KCBS surrogate on free (unnormalized, not orthogonal) vectors.

    ``sum_i Re tr(O_i O_{i+1} rho) + w sum_i |<v_i|v_{i+1}>|^2`` after row
    normalization of the raw vectors. Parameters are the real parts followed
    by the imaginary parts (the latter absent in real mode).
    """

    def __init__(self, rho, weight, real):
        self.rho = rho
        self.rho_re = np.real(rho) if real else rho
        self.dim = rho.shape[0]
        self.weight = weight
        self.real = real
        self.tr = float(np.real(np.trace(rho)))

    def pack(self, vectors):
        v = np.asarray(vectors)
        if self.real:
            return np.real(v).ravel().copy()
        return np.concatenate([np.real(v).ravel(), np.imag(v).ravel()])

    def unpack(self, x):
        n = 5 * self.dim
        raw = x[:n].reshape(5, self.dim)
        if not self.real:
            raw = raw + 1j * x[n:].reshape(5, self.dim)
        return raw

    def _parts(self, x):
        u = self.unpack(x)
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        v = u / norms
        rho = self.rho_re if self.real else self.rho
        rv = v @ rho.T  # rows are rho|v_a>
        m = v.conj() @ rv.T  # m[a, b] = <v_a|rho|v_b>
        g = v.conj() @ v.T  # g[a, b] = <v_a|v_b>
        return u, norms, v, rv, m, g

    def value(self, x):
        _, _, _, _, m, g = self._parts(x)
        p = np.real(np.diag(m))
        gij = g[_CYCLE, _NEXT]
        kcbs = np.sum(4 * np.real(gij * m[_NEXT, _CYCLE]) - 2 * p[_CYCLE] - 2 * p[_NEXT] + self.tr)
        return float(kcbs + self.weight * np.sum(np.abs(gij) ** 2))

    def value_and_grad(self, x):
        u, norms, v, rv, m, g = self._parts(x)
        i, j = _CYCLE, _NEXT
        p = np.real(np.diag(m))
        gij = g[i, j]
        val = np.sum(4 * np.real(gij * m[j, i]) - 2 * p[i] - 2 * p[j] + self.tr)
        val += self.weight * np.sum(np.abs(gij) ** 2)

        # Wirtinger derivative dF/d(conj v_a), one row per vector
        gv = -4 * rv
        gv[i] += 2 * (v[j] * m[j, i][:, None] + rv[j] * g[j, i][:, None])
        gv[j] += 2 * (rv[i] * g[i, j][:, None] + v[i] * m[i, j][:, None])
        gv[i] += self.weight * v[j] * g[j, i][:, None]
        gv[j] += self.weight * v[i] * g[i, j][:, None]
        # through the row normalization v = u/|u|
        radial = np.real(np.sum(v.conj() * gv, axis=1, keepdims=True))
        gu = (gv - v * radial) / norms
        if self.real:
            grad = 2 * np.real(gu).ravel()
        else:
            grad = 2 * np.concatenate([np.real(gu).ravel(), np.imag(gu).ravel()])
        return float(val), grad


def kcbs_surrogate(rho, weight=1e4, real=False):
    """Penalized KCBS objective used by :func:`optimize_pentagram` (exposed for tests)."""
    return _PenalizedKcbs(as_matrix(rho), weight, real)


def _local_search(obj, start, cfg):
    x0 = obj.pack(start)
    res = minimize(
        obj.value,
        x0,
        method="Nelder-Mead",
        options={"maxiter": cfg.max_iterations, "adaptive": True, "xatol": cfg.tolerance, "fatol": cfg.tolerance},
    )
    x = res.x
    if cfg.polish:
        res = minimize(
            obj.value_and_grad,
            x,
            jac=True,
            method="BFGS",
            options={"gtol": cfg.tolerance, "maxiter": cfg.max_iterations},
        )
        x = res.x
    v = obj.unpack(x)
    if obj.real:
        v = v.astype(complex)
    return close_pentagram(v)


def optimize_pentagram(rho_s, cfg=OptimizerConfig(), initial=()):
    """Minimize ``sum_i tr(O_i O_{i+1} rho_s)`` over cyclically orthogonal pentagrams.

    Each restart runs a simplex search on the penalized surrogate (optionally
    polished by BFGS on the same surrogate), then snaps the vectors back onto
    exact cyclic orthogonality; the reported value is evaluated on that exact
    configuration. Pentagrams in ``initial`` are tried before the random
    restarts. Restart ``r`` starts from ``random_pentagram(dim, (seed, r))``,
    so adding restarts never changes earlier ones.

    Returns:
        tuple: ``(Pentagram, value)`` with the smallest value; ties go to the
        earliest restart.
    """
    rho_s = as_matrix(rho_s)
    validate_density_block(rho_s)
    dim = rho_s.shape[0]
    if dim < 3:
        raise DimensionMismatch("KCBS needs dimension >= 3")
    real = cfg.mode == "real"
    tr = float(np.real(np.trace(rho_s)))
    search_rho = rho_s / tr if tr > 1e-300 else np.eye(dim, dtype=complex) / dim
    obj = _PenalizedKcbs(search_rho, cfg.penalty_weight, real)

    starts = [pg.vectors for pg in initial]
    starts += [random_pentagram(dim, (cfg.seed, r), real=real).vectors for r in range(cfg.restarts)]
    best, best_val = None, np.inf
    for start in starts:
        try:
            pg = _local_search(obj, start, cfg)
        except DegenerateConfiguration:
            continue
        val = _kcbs_sum(pg, rho_s)
        if val < best_val:
            best, best_val = pg, val
    if best is None:
        raise DegenerateConfiguration("no restart produced a valid pentagram")
    return best, float(best_val)


# ---------------------------------------------------------------------------
# time sweep

NAIVE_SIGNS = (-1,) * 5  # decay always answers NO: c = +5


@dataclass
class KcbsPoint:
    time: float
    state: object  # JointState
    pentagram: Pentagram
    result: CriterionResult  # requested sign mode
    optimal: CriterionResult  # c = -3
    naive: CriterionResult  # c = +5


def kcbs_sweep_points(rho0, params, grid, cfg=OptimizerConfig(), sign_mode="optimal", optimize="per-time"):
    """Like :func:`kcbs_sweep` but keeps states, pentagrams and both sign modes."""
    if sign_mode not in ("optimal", "naive"):
        raise ValueError(f"unknown sign mode {sign_mode!r}")
    if optimize not in ("per-time", "fixed"):
        raise ValueError(f"unknown optimize mode {optimize!r}")
    grid = [float(t) for t in grid]
    if any(t < 0 for t in grid) or any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("time grid must be nonnegative and ascending")
    best_signs, _ = optimal_cycle_signs(5)
    points, prev = [], None
    for t in grid:
        js = evolve_joint(rho0, params, t)
        if prev is None or optimize == "per-time":
            warm = () if prev is None else (prev,)
            pg, _ = optimize_pentagram(js.rho_s, cfg, initial=warm)
            if prev is not None and _kcbs_sum(prev, js.rho_s) <= _kcbs_sum(pg, js.rho_s):
                pg = prev
        else:
            pg = prev
        prev = pg
        opt = kcbs_decay_value(pg, best_signs, js)
        naive = kcbs_decay_value(pg, NAIVE_SIGNS, js)
        points.append(KcbsPoint(t, js, pg, opt if sign_mode == "optimal" else naive, opt, naive))
    return points


def kcbs_sweep(rho0, params, grid, cfg=OptimizerConfig(), sign_mode="optimal", optimize="per-time"):
    """Decay-modified KCBS value along a time grid.

    At each time the pair is evolved jointly, the pentagram is re-optimized on
    the surviving block (warm-started from the previous optimum) and the
    decayed weight enters with ``c = -3`` (``"optimal"``) or ``c = +5``
    (``"naive"``).
    """
    return [pt.result for pt in kcbs_sweep_points(rho0, params, grid, cfg, sign_mode, optimize)]


# ---------------------------------------------------------------------------
# CHSH


def _unit_or_any(vec, fallback):
    n = np.linalg.norm(vec)
    return vec / n if n > 1e-14 else fallback


def chsh_optimal_settings(rho):
    """Projectors ``(Pa, Pa', Pb, Pb')`` reaching the maximal CHSH value of ``rho``.

    With ``c, c'`` the two leading right singular vectors of the correlation
    matrix ``T``, Bob measures ``cos(th) c +- sin(th) c'`` and Alice the
    normalized ``T c`` and ``T c'``, where ``tan(th) = s2/s1``.
    """
    rho = validate_state(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatch("two-qubit state required")
    t = correlation_matrix(rho)
    _, s, vt = np.linalg.svd(t)
    c, c2 = vt[0], vt[1]
    theta = np.arctan2(s[1], s[0])
    a = _unit_or_any(t @ c, np.array([0.0, 0.0, 1.0]))
    a2 = _unit_or_any(t @ c2, np.cross(a, c) if np.linalg.norm(np.cross(a, c)) > 1e-12 else np.array([1.0, 0.0, 0.0]))
    b = np.cos(theta) * c + np.sin(theta) * c2
    b2 = np.cos(theta) * c - np.sin(theta) * c2
    settings = tuple(direction_projector(n) for n in (a, a2, b, b2))
    value = float(np.real(np.trace(chsh_from_projectors(settings) @ rho)))
    return settings, value


def tsirelson_settings():
    """Fixed settings reaching ``2 sqrt 2`` on the singlet ``psi-``."""
    z, x = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
    b = -(z + x) / np.sqrt(2)
    b2 = -(z - x) / np.sqrt(2)
    return tuple(direction_projector(n) for n in (z, x, b, b2))

