import math

import numpy as np
import pytest

from shapejc import algebra
from shapejc.algebra import Branch, HarmonicOscillator, Morse, ScalingChain
from shapejc.dressed import (
    DressedBasis,
    b_plus_matrix,
    commutator_diagnostic,
    commutator_diagonal,
    diagonalize_dressed,
    dressed_states,
    h_blocks,
    h_matrix,
    s2_matrix,
    s_matrix,
)
from shapejc.errors import LevelOutOfRange, NegativeDriveStrength

HO = HarmonicOscillator(mass=1.0, omega=1.0)
MORSE = Morse(v0=25.0, lam=1.0, mass=0.5)
SCALING = ScalingChain(r1=1.0, q=0.5)
FAMILIES = [HO, MORSE, SCALING]


def test_basis_layout():
    basis = DressedBasis(2)
    assert basis.dim == 7
    assert basis.labels == ("v0", "u0", "v1", "u1", "v2", "u2", "v3")
    assert basis.pairs() == [(0, 1, 2), (1, 3, 4), (2, 5, 6)]


def test_b_plus_subdiagonal():
    np.testing.assert_allclose(np.diagonal(b_plus_matrix(HO, 2).entries, -1), [1, math.sqrt(2), math.sqrt(3)])
    np.testing.assert_allclose(
        np.diagonal(b_plus_matrix(MORSE, 2).entries, -1), np.sqrt([8.0, 14.0, 18.0]), rtol=1e-14
    )


def test_s_couplings_and_s2():
    s = s_matrix(MORSE, 1).entries
    assert s[1, 2] == s[2, 1] == pytest.approx(math.sqrt(8))
    assert s[3, 4] == pytest.approx(math.sqrt(14))
    assert np.count_nonzero(s) == 4
    vals = np.linalg.eigvalsh(s2_matrix(SCALING, 1).entries)
    np.testing.assert_allclose(vals, [0, 1, 1, 1.5, 1.5])


@pytest.mark.parametrize("family", FAMILIES)
def test_s_squared_matches_direct_s2(family):
    s = s_matrix(family, 3).entries
    np.testing.assert_allclose(s @ s, s2_matrix(family, 3).entries, atol=1e-13)


def test_matrices_are_read_only():
    with pytest.raises(ValueError):
        s_matrix(HO, 1).entries[0, 0] = 1.0


def test_h_blocks_ho_strong_drive():
    blocks = h_blocks(HO, 4.0, 1)
    assert blocks[0][2].tolist() == [[0.0]]
    np.testing.assert_allclose(np.linalg.eigvalsh(blocks[1][2]), [-1, 3], atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(blocks[2][2]), [2 - 2 * math.sqrt(2), 2 + 2 * math.sqrt(2)])


def test_h_block_diagonal_structure():
    h = h_matrix(MORSE, 2.0, 3).entries
    mask = np.zeros_like(h, dtype=bool)
    mask[0, 0] = True
    for _, iu, iv in DressedBasis(3).pairs():
        mask[np.ix_([iu, iv], [iu, iv])] = True
    assert np.all(h[~mask] == 0)


@pytest.mark.parametrize("family", FAMILIES)
def test_zero_drive_doublets_degenerate(family):
    spec = diagonalize_dressed(family, 0.0, 2)
    for lev in spec.table.levels:
        assert lev.e_minus == pytest.approx(lev.e_plus, abs=1e-12)
        assert lev.e_minus == pytest.approx(lev.epsilon, abs=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_dressed_states(family):
    s = s_matrix(family, 2).entries
    states = dressed_states(family, 2)
    assert [(st.m, st.branch) for st in states[:2]] == [(0, Branch.MINUS), (0, Branch.PLUS)]
    vecs = np.array([st.vector for st in states])
    np.testing.assert_allclose(vecs @ vecs.T, np.eye(len(states)), atol=1e-15)
    for st in states:
        lam = st.branch.sign * math.sqrt(algebra.epsilon(family, st.m + 1))
        np.testing.assert_allclose(s @ st.vector, lam * st.vector, atol=1e-13)


def test_commutator_examples():
    np.testing.assert_allclose(commutator_diagnostic(HO, 3), [1, 1, 1, 1], atol=1e-14)
    np.testing.assert_allclose(commutator_diagnostic(MORSE, 2), [8, 6, 4], atol=1e-13)
    np.testing.assert_allclose(commutator_diagnostic(SCALING, 2), [1, 0.5, 0.25], atol=1e-14)


@pytest.mark.parametrize("family", FAMILIES)
def test_commutator_is_first_difference(family):
    diag, edge = commutator_diagonal(family, 2)
    eps = [algebra.epsilon(family, n) for n in range(4)]
    np.testing.assert_allclose(diag, np.diff(eps), atol=1e-13)
    # the truncated top entry only sees -eps_3
    assert edge == pytest.approx(-eps[3])


def test_ground_vector_lives_on_v0():
    vals, vecs = np.linalg.eigh(h_matrix(MORSE, 2.0, 3).entries)
    zero = np.argmin(np.abs(vals))
    assert abs(vals[zero]) < 1e-12
    assert abs(vecs[0, zero]) == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["householder", "lapack"])
def test_diagonalize_reference(method):
    spec = diagonalize_dressed(MORSE, 2.0, 3, method=method)
    assert spec.max_deviation <= 1e-10
    assert spec.eigenvalues.size == 9
    assert spec.table.ground == pytest.approx(0.0, abs=1e-12)
    assert spec.labels[0] == "ground"


def test_n_max_zero():
    spec = diagonalize_dressed(MORSE, 2.0, 0)
    np.testing.assert_allclose(spec.eigenvalues, [0, 4, 12], atol=1e-12)


def test_errors():
    with pytest.raises(LevelOutOfRange, match="4 dressed pairs"):
        h_matrix(MORSE, 2.0, 4)
    with pytest.raises(NegativeDriveStrength):
        h_matrix(HO, -1.0, 1)
    with pytest.raises(TypeError):
        s_matrix(HO, 1.5)
