import math

import numpy as np
import pytest

from kerr_thermo import (
    DensityMatrix,
    SystemParams,
    Truncation,
    annihilation,
    creation,
    gibbs_populations,
    gibbs_state,
    hamiltonian,
    mean_photon_number,
    thermal_occupation,
    vacuum_state,
)


class TestAnnihilation:
    def test_dim_two(self):
        np.testing.assert_array_equal(annihilation(2), [[0, 1], [0, 0]])

    def test_dim_three_superdiagonal(self):
        a = annihilation(3)
        assert a[0, 1] == 1.0
        assert a[1, 2] == pytest.approx(math.sqrt(2))
        a[0, 1] = a[1, 2] = 0
        np.testing.assert_array_equal(a, np.zeros((3, 3)))

    def test_commutator_identity_up_to_truncation(self):
        # direct matrix multiplication oracle: [a, a^dag] = 1 except the last level
        a = annihilation(20)
        comm = a @ a.conj().T - a.conj().T @ a
        np.testing.assert_allclose(np.diagonal(comm)[:19], np.ones(19), atol=1e-14)
        assert comm[19, 19].real == pytest.approx(-19.0)
        off = comm - np.diag(np.diagonal(comm))
        assert np.abs(off).max() == 0.0

    def test_creation_raises_fock_states(self):
        ad = creation(6)
        for n in range(5):
            ket = np.zeros(6)
            ket[n] = 1.0
            raised = ad @ ket
            assert raised[n + 1] == pytest.approx(math.sqrt(n + 1))

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            annihilation(1)
        with pytest.raises(ValueError):
            annihilation(0)


class TestSystemParams:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SystemParams(delta=0.0, chi=-0.1, drive=0.0, n_th=0.0)
        with pytest.raises(ValueError):
            SystemParams(delta=0.0, chi=0.0, drive=0.0, n_th=-0.1)
        with pytest.raises(ValueError):
            SystemParams(delta=0.0, chi=0.0, drive=0.0, n_th=0.0, gamma=0.0)
        with pytest.raises(ValueError):
            SystemParams(delta=float("nan"), chi=0.0, drive=0.0, n_th=0.0)

    def test_with_n_th(self):
        p = SystemParams(delta=-3.5, chi=0.5, drive=1.0, n_th=0.05)
        q = p.with_n_th(0.06)
        assert q.n_th == 0.06 and q.delta == p.delta and q.chi == p.chi


class TestHamiltonian:
    def test_pure_detuning(self):
        params = SystemParams(delta=1.0, chi=0.0, drive=0.0, n_th=0.0)
        h = hamiltonian(params, Truncation(3))
        np.testing.assert_allclose(h, np.diag([0.0, 1.0, 2.0]))

    def test_kerr_diagonal(self):
        params = SystemParams(delta=0.0, chi=1.0, drive=0.0, n_th=0.0)
        h = hamiltonian(params, Truncation(3))
        np.testing.assert_allclose(h, np.diag([0.0, 0.0, 2.0]))

    def test_full_matrix_hand_assembled(self):
        # element-by-element assembly oracle
        delta, chi, drive = -3.5, 0.5, 1.0
        dim = 4
        expected = np.zeros((dim, dim), dtype=complex)
        for n in range(dim):
            expected[n, n] = delta * n + chi * n * (n - 1)
        for n in range(dim - 1):
            expected[n, n + 1] = drive * math.sqrt(n + 1)
            expected[n + 1, n] = drive * math.sqrt(n + 1)
        params = SystemParams(delta=delta, chi=chi, drive=drive, n_th=0.0)
        np.testing.assert_allclose(hamiltonian(params, Truncation(dim)), expected, atol=1e-15)

    def test_hermitian_for_random_params(self, rng):
        for _ in range(20):
            params = SystemParams(
                delta=float(rng.uniform(-5, 5)),
                chi=float(rng.uniform(0, 2)),
                drive=float(rng.uniform(0, 2)),
                n_th=float(rng.uniform(0, 1)),
            )
            h = hamiltonian(params, Truncation(12))
            assert np.abs(h - h.conj().T).max() == 0.0


class TestGibbsState:
    def test_zero_temperature_is_vacuum(self):
        g = gibbs_state(0.0, Truncation(5))
        np.testing.assert_array_equal(g.entries, vacuum_state(Truncation(5)).entries)

    def test_geometric_ratio_half(self):
        g = gibbs_state(1.0, Truncation(80))
        p = g.populations()
        np.testing.assert_allclose(p[:20], 0.5 ** (np.arange(20) + 1), rtol=1e-12)

    def test_mean_photon_number(self):
        # geometric-series sum oracle
        g = gibbs_state(0.05, Truncation(30))
        assert mean_photon_number(g) == pytest.approx(0.05, abs=1e-12)

    def test_trace_exactly_one_and_monotone_positive(self):
        for n in (0.01, 0.3, 2.0):
            g = gibbs_state(n, Truncation(25))
            p = g.populations()
            assert complex(g.entries.trace()).real == pytest.approx(1.0, abs=1e-15)
            assert np.all(np.diff(p) < 0)
            assert np.all(p > 0)

    def test_tail_mass_reported(self):
        _, tail = gibbs_populations(1.0, 10)
        assert tail == pytest.approx(0.5**10, rel=1e-12)

    def test_negative_occupation_rejected(self):
        with pytest.raises(ValueError):
            gibbs_state(-0.01, Truncation(10))


class TestThermalOccupation:
    def test_zero_temperature_limit(self):
        assert thermal_occupation(700.0) == pytest.approx(0.0, abs=1e-300)

    def test_ln2_gives_one(self):
        assert thermal_occupation(math.log(2.0)) == pytest.approx(1.0, rel=1e-14)

    def test_numeric_inversion(self):
        # inversion oracle: beta giving occupation 0.05 is ln(21)
        assert thermal_occupation(math.log(21.0)) == pytest.approx(0.05, rel=1e-13)
        assert thermal_occupation(3.0445) == pytest.approx(0.05, abs=1e-5)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            thermal_occupation(0.0)
        with pytest.raises(ValueError):
            thermal_occupation(-1.0)


class TestVacuumState:
    def test_matrix(self):
        v = vacuum_state(Truncation(2))
        np.testing.assert_array_equal(v.entries, np.diag([1.0, 0.0]))

    def test_pure_and_empty(self):
        v = vacuum_state(Truncation(8))
        assert float(np.einsum("ij,ji->", v.entries, v.entries).real) == pytest.approx(1.0)
        assert mean_photon_number(v) == 0.0


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        bad = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(bad)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.diag([0.6, 0.6]).astype(complex))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))

    def test_entries_read_only(self):
        v = vacuum_state(Truncation(3))
        with pytest.raises(ValueError):
            v.entries[0, 0] = 0.5
