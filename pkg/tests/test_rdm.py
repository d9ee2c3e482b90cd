import math

import numpy as np
import pytest

import oracles
from optslater import (
    FermionState,
    NotHermitian,
    NotNormalized,
    WrongShape,
    basis_state,
    borland_dennis_check,
    builtin_state,
    envelope_rank,
    haar_unitary,
    natural_orbitals,
    natural_orbitals_of,
    normalize,
    one_particle_rdm,
    random_state,
    rotate_basis,
)

R2 = 1 / math.sqrt(2)


def test_rdm_examples():
    assert np.allclose(one_particle_rdm(basis_state(6, 1, 2, 3)), np.diag([1, 1, 1, 0, 0, 0]))
    g = builtin_state("ghz", R2, R2, 3)
    assert np.allclose(one_particle_rdm(g), 0.5 * np.eye(6), atol=1e-15)
    rho = one_particle_rdm(builtin_state("eq36"))
    assert np.allclose(rho, np.diag([2 / 3] * 3 + [1 / 3] * 3), atol=1e-15)


def test_rdm_matches_index_formula(rng):
    for n, d in [(2, 4), (3, 6), (2, 5)]:
        s = random_state(n, d, seed=rng)
        assert np.allclose(one_particle_rdm(s), oracles.one_particle_rdm(s), atol=1e-13)


def test_rdm_off_diagonal_sign():
    # (|12> + |13>)/sqrt2 moves a particle 2 -> 3 with the same position
    s = normalize(FermionState(3, 2, {(1, 2): 1, (1, 3): 1}))
    assert one_particle_rdm(s)[1, 2] == pytest.approx(0.5)
    # (|12> + |23>)/sqrt2: orbital 1 sits first, orbital 3 second -> minus sign
    s = normalize(FermionState(3, 2, {(1, 2): 1, (2, 3): 1}))
    assert one_particle_rdm(s)[0, 2] == pytest.approx(-0.5)
    assert oracles.one_particle_rdm(s)[0, 2] == pytest.approx(-0.5)


def test_rdm_requires_normalized():
    s = FermionState(4, 2, {(1, 2): 2})
    with pytest.raises(NotNormalized):
        one_particle_rdm(s)
    rho = one_particle_rdm(s, allow_unnormalized=True)
    assert np.trace(rho).real == pytest.approx(8)


def test_rdm_covariance(rng):
    s = random_state(3, 6, seed=rng)
    U = haar_unitary(6, rng)
    rho = one_particle_rdm(s)
    assert np.allclose(one_particle_rdm(rotate_basis(s, U)), U @ rho @ U.conj().T, atol=1e-9)


def test_natural_orbitals_examples():
    dec = natural_orbitals(np.diag([1, 1, 1, 0, 0, 0]).astype(complex))
    assert np.allclose(dec.occupations, [1, 1, 1, 0, 0, 0])
    assert np.allclose(dec.orbitals, np.eye(6))
    dec = natural_orbitals_of(builtin_state("eq36"))
    assert np.allclose(dec.occupations, [2 / 3] * 3 + [1 / 3] * 3, atol=1e-14)
    assert np.allclose(dec.orbitals, np.eye(6), atol=1e-12)
    dec = natural_orbitals_of(random_state(3, 6, seed=4))
    assert dec.n_particles == pytest.approx(3, abs=1e-8)
    assert dec.d == 6
    assert np.all(np.diff(dec.occupations) <= 0)


def test_natural_orbitals_deterministic_in_clusters():
    # degenerate cluster {1, 2}: any rotation of the input gives the same output
    rng = np.random.default_rng(1)
    U = haar_unitary(2, rng)
    rho = np.diag([0.7, 0.7, 0.2]).astype(complex)
    rho2 = rho.copy()
    rho2[:2, :2] = U @ rho[:2, :2] @ U.conj().T
    a = natural_orbitals(rho)
    b = natural_orbitals(rho2)
    assert np.allclose(a.orbitals, b.orbitals)
    assert np.allclose(a.orbitals, np.eye(3))


def test_natural_orbital_phase():
    rng = np.random.default_rng(3)
    dec = natural_orbitals_of(random_state(2, 5, seed=rng))
    for c in range(5):
        v = dec.orbitals[:, c]
        k = np.argmax(np.abs(v))
        assert abs(v[k].imag) < 1e-14 and v[k].real > 0


def test_natural_orbitals_errors():
    with pytest.raises(NotHermitian):
        natural_orbitals(np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(NotHermitian):
        natural_orbitals(np.zeros((2, 3)))


def test_envelope_rank():
    assert envelope_rank(basis_state(6, 1, 2, 3)) == 3
    assert envelope_rank(builtin_state("ghz", R2, R2, 3)) == 6
    s = normalize(FermionState(6, 2, {(1, 2): 0.6, (3, 4): 0.8}))
    assert envelope_rank(s) == 4


def test_borland_dennis_examples():
    rep = borland_dennis_check(natural_orbitals_of(basis_state(6, 1, 2, 3)))
    assert rep.satisfied and rep.inequality_slack == pytest.approx(0)
    rep = borland_dennis_check(np.array([0.6, 0.55, 0.5, 0.5, 0.45, 0.4]))
    assert np.allclose(rep.sums, 1) and rep.inequality_slack == pytest.approx(0.35) and rep.satisfied
    rep = borland_dennis_check(np.array([0.9, 0.55, 0.5, 0.5, 0.45, 0.4]))
    assert not rep.satisfied
    # pair sums hold but the inequality fails
    rep = borland_dennis_check(np.array([0.9, 0.8, 0.6, 0.4, 0.2, 0.1]))
    assert np.allclose(rep.sums, 1) and rep.inequality_slack == pytest.approx(-0.1) and not rep.satisfied
    with pytest.raises(WrongShape):
        borland_dennis_check(np.ones(5))


def test_borland_dennis_random():
    for seed in range(20):
        assert borland_dennis_check(natural_orbitals_of(random_state(3, 6, seed=seed))).satisfied
