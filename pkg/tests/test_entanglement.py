import numpy as np
import pytest

from qrelax.entanglement import (
    binary_entropy,
    concurrence,
    entanglement_of_formation,
    eof_from_concurrence,
    pure_state_entanglement,
    spin_flip,
)
from qrelax.errors import InvalidStateError
from qrelax.operators import (
    SPIN_DOWN,
    SPIN_UP,
    ket_to_density,
    random_density_matrix,
    random_pure_state,
    random_unitary,
)
from qrelax.scenarios import bell_mixture_state

BELL = (np.kron(SPIN_UP, SPIN_DOWN) + np.kron(SPIN_DOWN, SPIN_UP)) / np.sqrt(2)
EOF_RHO_E = binary_entropy((1 + np.sqrt(3) / 2) / 2)


def werner(p):
    return p * ket_to_density(BELL) + (1 - p) * np.eye(4) / 4


class TestPureState:
    def test_product(self):
        assert pure_state_entanglement(np.kron(SPIN_UP, SPIN_UP)) == pytest.approx(0, abs=1e-15)

    def test_epr_pair(self):
        assert pure_state_entanglement(BELL) == pytest.approx(1, abs=1e-14)

    def test_schmidt_weights(self):
        psi = np.sqrt(0.75) * np.kron(SPIN_UP, SPIN_UP) + np.sqrt(0.25) * np.kron(SPIN_DOWN, SPIN_DOWN)
        assert pure_state_entanglement(psi) == pytest.approx(0.8112781244591328, abs=1e-14)

    def test_unnormalized(self):
        with pytest.raises(InvalidStateError):
            pure_state_entanglement(np.array([1, 1, 0, 0]))


class TestConcurrence:
    def test_bell(self):
        assert concurrence(ket_to_density(BELL)) == pytest.approx(1, abs=1e-12)

    def test_maximally_mixed(self):
        assert concurrence(np.eye(4) / 4) == 0

    def test_bell_mixture_spin_flip_spectrum(self):
        rho = bell_mixture_state()
        # brute force: full eigen-decomposition of the 4x4 product
        w = np.sort(np.linalg.eigvals(rho @ spin_flip(rho)).real)
        np.testing.assert_allclose(w, [0, 0, 0, 0.25], atol=1e-15)
        assert concurrence(rho) == pytest.approx(0.5, abs=1e-12)

    def test_werner_closed_form(self):
        # Werner state: C = max(0, (3p - 1) / 2), separable up to p = 1/3
        for p in np.linspace(0, 1, 13):
            assert concurrence(werner(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)

    def test_invalid(self):
        with pytest.raises(InvalidStateError):
            concurrence(np.eye(2) / 2)
        with pytest.raises(InvalidStateError):
            concurrence(np.diag([1.5, -0.5, 0, 0]))

    def test_local_unitary_invariance(self, rng):
        for _ in range(50):
            rho = random_density_matrix(4, rng, rank=int(rng.integers(1, 5)))
            U = np.kron(random_unitary(2, rng), random_unitary(2, rng))
            assert concurrence(U @ rho @ U.conj().T) == pytest.approx(concurrence(rho), abs=1e-10)


class TestEntanglementOfFormation:
    def test_bell_mixture(self):
        rep = entanglement_of_formation(bell_mixture_state())
        assert rep.concurrence == pytest.approx(0.5, abs=1e-12)
        assert rep.eof == pytest.approx(0.3546, abs=5e-4)
        assert rep.eof == pytest.approx(EOF_RHO_E, abs=1e-12)
        assert round(rep.eof, 3) == 0.355

    def test_bell(self):
        assert entanglement_of_formation(ket_to_density(BELL)).eof == pytest.approx(1, abs=1e-12)

    def test_werner_threshold(self):
        rep = entanglement_of_formation(werner(1 / 3))
        assert rep.concurrence == pytest.approx(0, abs=1e-12)
        assert rep.eof == pytest.approx(0, abs=1e-10)

    def test_pure_states_match_entropy(self, rng):
        for _ in range(100):
            psi = random_pure_state(4, rng)
            rep = entanglement_of_formation(ket_to_density(psi))
            assert rep.eof == pytest.approx(pure_state_entanglement(psi), abs=1e-9)

    def test_range(self, rng):
        for _ in range(1000):
            rep = entanglement_of_formation(random_density_matrix(4, rng, rank=int(rng.integers(1, 5))))
            assert 0 <= rep.concurrence <= 1
            assert 0 <= rep.eof <= 1
            lam = rep.spin_flip_eigenvalues
            assert list(lam) == sorted(lam, reverse=True)
            assert rep.concurrence == pytest.approx(max(0.0, lam[0] - sum(lam[1:])), abs=1e-15)

    def test_monotone_link(self):
        assert eof_from_concurrence(0) == 0
        assert eof_from_concurrence(1) == pytest.approx(1)
        c = np.linspace(1e-4, 1, 500)
        assert np.all(np.diff([eof_from_concurrence(x) for x in c]) > 0)
