import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dctx.errors import DegenerateConfiguration, NotAProjector
from dctx.evolution import KAON, DecayParams, single_particle_kraus
from dctx.linalg import I2, commutator, dag, operator_norm, projector, tensor
from dctx.observables import (
    Pentagram, bloch_projector, close_pentagram, dress_local, kcbs_optimal_qutrit,
    magic_square, random_pentagram,
)


def test_random_pentagram_valid_and_deterministic():
    pg = random_pentagram(3, 7)
    assert pg.orthogonality_residual() < 1e-9
    assert pg.norm_residual() < 1e-12
    np.testing.assert_array_equal(pg.vectors, random_pentagram(3, 7).vectors)
    assert not np.array_equal(pg.vectors, random_pentagram(3, 8).vectors)


def test_random_pentagram_never_degenerate_in_dim4():
    for seed in range(1000):
        assert random_pentagram(4, seed).is_valid()


def test_random_pentagram_real_mode():
    pg = random_pentagram(4, 3, real=True)
    assert np.all(pg.vectors.imag == 0)
    assert pg.is_valid()


def test_closure_rejects_degenerate_input():
    e = np.eye(3)
    with pytest.raises(DegenerateConfiguration):
        close_pentagram([e[0], e[0], e[1], e[2], e[0]])


def test_pentagram_observables_commute_cyclically():
    pg = random_pentagram(5, 11)
    obs = pg.observables()
    for i in range(5):
        assert np.abs(commutator(obs[i], obs[(i + 1) % 5])).max() < 1e-9


def test_optimal_qutrit_configuration():
    pg, psi = kcbs_optimal_qutrit()
    assert pg.orthogonality_residual() < 1e-10
    assert abs(sum(abs(np.vdot(v, psi)) ** 2 for v in pg.vectors) - np.sqrt(5)) < 1e-10


def test_pentagram_text_roundtrip():
    pg = random_pentagram(4, 5)
    text = pg.to_text()
    assert text.splitlines()[0].startswith("v1 ")
    assert len(text.splitlines()[2].split()) == 1 + 2 * 4
    np.testing.assert_array_equal(Pentagram.from_text(text).vectors, pg.vectors)


def test_pentagram_text_rejects_missing_vector():
    text = "\n".join(random_pentagram(3, 1).to_text().splitlines()[:4])
    with pytest.raises(ValueError):
        Pentagram.from_text(text)


# --- magic square ----------------------------------------------------------


def test_magic_square_entries():
    sq = magic_square()
    assert sq.check() < 1e-12
    eye = np.eye(4)
    r1 = sq.row(0)
    np.testing.assert_allclose(r1[0] @ r1[1] @ r1[2], eye, atol=1e-12)
    # this grid puts the -1 on the third row, not the third column
    r3 = sq.row(2)
    np.testing.assert_allclose(r3[0] @ r3[1] @ r3[2], -eye, atol=1e-12)
    c3 = sq.col(2)
    np.testing.assert_allclose(c3[0] @ c3[1] @ c3[2], eye, atol=1e-12)


def test_magic_square_parity_obstruction():
    sq = magic_square()
    eye = np.eye(4)
    rows = [np.linalg.multi_dot(sq.row(r)) for r in range(3)]
    cols = [np.linalg.multi_dot(sq.col(c)) for c in range(3)]
    prod_rows = np.linalg.multi_dot(rows)
    prod_cols = np.linalg.multi_dot(cols)
    # rows and columns multiply to opposite signs
    np.testing.assert_allclose(prod_rows @ prod_cols, -eye, atol=1e-12)
    assert np.prod(sq.parities()) == -1


# --- dressed observables ---------------------------------------------------

projectors = st.tuples(st.floats(0, np.pi), st.floats(0, 2 * np.pi)).map(lambda a: bloch_projector(*a))


def test_dress_at_zero_is_bare():
    p = bloch_projector(0.4, 1.1)
    for sign in (1, -1):
        np.testing.assert_allclose(dress_local(p, KAON, 0.0, sign).matrix, 2 * p - I2, atol=1e-15)


def test_dress_at_long_times_is_sign():
    p = bloch_projector(1.0, 0.2)
    params = DecayParams(1.0, 0.5, 0.5)
    for sign in (1, -1):
        np.testing.assert_allclose(dress_local(p, params, 200.0, sign).matrix, sign * I2, atol=1e-10)


def test_dress_rejects_non_projector():
    with pytest.raises(NotAProjector):
        dress_local(np.diag([1.0, 0.5]), KAON, 1.0)


@settings(max_examples=60, deadline=None)
@given(projectors, st.floats(0, 5), st.sampled_from([1, -1]))
def test_dress_bounded_and_hermitian(p, t, sign):
    d = dress_local(p, KAON, t, sign).matrix
    assert np.abs(d - dag(d)).max() < 1e-12
    assert operator_norm(d) <= 1 + 1e-10


@settings(max_examples=60, deadline=None)
@given(projectors, st.floats(0, 5), st.sampled_from([1, -1]))
def test_dress_complement_identity(p, t, sign):
    _, kd = single_particle_kraus(KAON, t)
    total = dress_local(p, KAON, t, sign).matrix + dress_local(I2 - p, KAON, t, sign).matrix
    np.testing.assert_allclose(total, 2 * sign * dag(kd) @ kd, atol=1e-12)


def test_dressed_parties_commute_exactly():
    da = dress_local(bloch_projector(0.3, 0.1), KAON, 1.2, 1).matrix
    db = dress_local(bloch_projector(2.0, 1.7), KAON, 0.4, -1).matrix
    np.testing.assert_array_equal(commutator(tensor(da, I2), tensor(I2, db)), 0)
