"""Measurement configurations: KCBS pentagrams, the Mermin-Peres square and
decay-dressed local observables."""
from dataclasses import dataclass

import numpy as np

from dctx.errors import DegenerateConfiguration, DimensionMismatch
from dctx.evolution import single_particle_kraus
from dctx.linalg import I2, SX, SY, SZ, check_projector, commutator, dag, projector, tensor

ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Pentagram:
    """Five unit vectors with ``<v_i|v_{i+1 mod 5}> = 0``."""

    vectors: np.ndarray  # shape (5, dim)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != 5 or v.shape[1] < 3:
            raise DimensionMismatch(f"pentagram needs 5 vectors of dim >= 3, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def projectors(self):
        return [projector(v) for v in self.vectors]

    def observables(self):
        eye = np.eye(self.dim)
        return [2 * p - eye for p in self.projectors()]

    def orthogonality_residual(self):
        v = self.vectors
        return max(abs(np.vdot(v[i], v[(i + 1) % 5])) for i in range(5))

    def norm_residual(self):
        return float(np.max(np.abs(np.linalg.norm(self.vectors, axis=1) - 1)))

    def is_valid(self, tol=ORTHO_TOL):
        return self.orthogonality_residual() <= tol and self.norm_residual() <= 1e-12

    def to_text(self):
        """One line per vector: ``v<i> re im re im ...`` with 17 significant digits."""
        lines = []
        for i, v in enumerate(self.vectors, start=1):
            nums = " ".join(f"{x.real:.17g} {x.imag:.17g}" for x in v)
            lines.append(f"v{i} {nums}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tag, *nums = line.split()
            if not (tag.startswith("v") and tag[1:].isdigit()) or len(nums) % 2:
                raise ValueError(f"malformed pentagram line: {line!r}")
            vals = np.array(nums, dtype=float)
            rows[int(tag[1:])] = vals[0::2] + 1j * vals[1::2]
        if sorted(rows) != [1, 2, 3, 4, 5]:
            raise ValueError(f"expected vectors v1..v5, got {sorted(rows)}")
        return cls(np.array([rows[i] for i in range(1, 6)]))


def _orthogonalize_against(v, basis):
    """Component of ``v`` orthogonal to ``span(basis)``, not normalized."""
    q, _ = np.linalg.qr(np.array(basis).T)
    return v - q @ (q.conj().T @ v)


def close_pentagram(vectors, min_residual=1e-6):
    """Enforce cyclic orthogonality on five approximately orthogonal vectors.

    ``v2..v4`` are projected off their predecessor, ``v5`` off both ``v4``
    and ``v1``; all are renormalized.

    Raises:
        DegenerateConfiguration: if a residual norm drops below ``min_residual``.
    """
    v = [np.asarray(x, dtype=complex) for x in vectors]
    out = [v[0] / np.linalg.norm(v[0])]
    for i in range(1, 5):
        basis = [out[i - 1]] if i < 4 else [out[3], out[0]]
        w = _orthogonalize_against(v[i], basis)
        nrm = np.linalg.norm(w)
        if nrm < min_residual:
            raise DegenerateConfiguration(f"v{i + 1} residual norm {nrm:.3g} after orthogonalization")
        out.append(w / nrm)
    return Pentagram(np.array(out))


def _haar_vector(rng, dim, real=False):
    v = rng.standard_normal(dim)
    if not real:
        v = v + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pentagram(dim, seed, real=False, max_draws=100):
    """Random cyclically orthogonal pentagram, deterministic in ``seed``."""
    if dim < 3:
        raise DimensionMismatch("KCBS needs dimension >= 3")
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        vs = [_haar_vector(rng, dim, real)]
        for _ in range(4):
            w = _orthogonalize_against(_haar_vector(rng, dim, real), [vs[-1]])
            vs.append(w / np.linalg.norm(w))
        try:
            return close_pentagram(vs)
        except DegenerateConfiguration:
            continue
    raise DegenerateConfiguration(f"no valid pentagram after {max_draws} draws")


def kcbs_optimal_qutrit():
    """Symmetric qutrit pentagram and the state ``(0, 0, 1)`` reaching ``5 - 4 sqrt 5``."""
    c = np.cos(np.pi / 5)
    cos_t = np.sqrt(c / (1 + c))
    sin_t = np.sqrt(1 - cos_t**2)
    ang = 4 * np.pi * np.arange(5) / 5
    vecs = np.stack([sin_t * np.cos(ang), sin_t * np.sin(ang), np.full(5, cos_t)], axis=1)
    return Pentagram(vecs.astype(complex)), np.array([0, 0, 1], dtype=complex)


@dataclass(frozen=True)
class MagicSquare:
    ops: tuple  # 3 rows of 3 4x4 matrices

    def row(self, r):
        return self.ops[r]

    def col(self, c):
        return tuple(self.ops[r][c] for r in range(3))

    def contexts(self):
        """The six contexts (rows, then columns) with the sign of their product.

        For the canonical square every context multiplies to ``+1`` except the
        third row, which gives ``-1``.
        """
        eye = np.eye(4)
        out = []
        for ctx in [self.row(r) for r in range(3)] + [self.col(c) for c in range(3)]:
            prod = ctx[0] @ ctx[1] @ ctx[2]
            out.append((ctx, 1 if np.abs(prod - eye).max() < np.abs(prod + eye).max() else -1))
        return out

    def parities(self):
        return tuple(sign for _, sign in self.contexts())

    def check(self, tol=1e-12):
        """Max residual over all square invariants (dichotomic, commuting, products)."""
        eye = np.eye(4)
        res = 0.0
        for r in range(3):
            for c in range(3):
                a = self.ops[r][c]
                res = max(res, np.abs(a - dag(a)).max(), np.abs(a @ a - eye).max())
        for ctx, sign in self.contexts():
            for i in range(3):
                for j in range(i + 1, 3):
                    res = max(res, np.abs(commutator(ctx[i], ctx[j])).max())
            res = max(res, np.abs(ctx[0] @ ctx[1] @ ctx[2] - sign * eye).max())
        # a noncontextual +-1 assignment would force the product of all six signs to +1
        res = max(res, abs(np.prod(self.parities()) + 1))
        return float(res)


#: Signs of the six context products (rows 1-3, columns 1-3) of the canonical square.
SQUARE_PARITIES = (1, 1, -1, 1, 1, 1)


def magic_square():
    return MagicSquare((
        (tensor(SX, I2), tensor(I2, SZ), tensor(SX, SZ)),
        (tensor(I2, SX), tensor(SZ, I2), tensor(SZ, SX)),
        (tensor(SX, SX), tensor(SZ, SZ), tensor(SY, SY)),
    ))


@dataclass(frozen=True)
class DressedObservable:
    matrix: np.ndarray
    time: float
    sign: int
    projector: np.ndarray


def dress_local(p_op, params, t, sign=1):
    """Heisenberg-picture single-party observable after decay.

    ``D = K_s^dagger (2P - 1) K_s + sign * K_d^dagger K_d``: the surviving
    part is measured with ``2P - 1`` and the decayed outcome is assigned
    ``sign``.
    """
    p_op = check_projector(p_op)
    if p_op.shape != (2, 2):
        raise DimensionMismatch("local projector must be 2x2")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    k_s, k_d = single_particle_kraus(params, t)
    mat = dag(k_s) @ (2 * p_op - I2) @ k_s + sign * dag(k_d) @ k_d
    return DressedObservable(matrix=mat, time=float(t), sign=sign, projector=p_op)


def effect_local(p_op, params, t):
    """YES-effect ``K_s^dagger P K_s + K_d^dagger K_d`` (decay counted as YES)."""
    p_op = check_projector(p_op)
    k_s, k_d = single_particle_kraus(params, t)
    return dag(k_s) @ p_op @ k_s + dag(k_d) @ k_d


def bloch_projector(theta, phi):
    """``|n><n|`` for ``|n> = cos(theta/2)|1> + e^{i phi} sin(theta/2)|2>``."""
    v = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return projector(v)


def direction_projector(n):
    """Projector ``(1 + n.sigma)/2`` for a real unit 3-vector ``n``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    return (I2 + n[0] * SX + n[1] * SY + n[2] * SZ) / 2


#: |K0> = (|K_S> + |K_L>)/sqrt 2 in the mass basis (CP violation neglected).
STRANGENESS = projector(np.array([1, 1]) / np.sqrt(2))
