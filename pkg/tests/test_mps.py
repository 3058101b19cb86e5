"""MPS construction, retrieval, expectation and contraction against dense oracles."""

import numpy as np
import pytest
from itertools import product

from qres.errors import InvalidInputError, ShapeError
from qres.mps import MatrixProductState, mps_from_dense, product_mps
from qres.resources import make_ghz_mps

from conftest import kron_pauli, random_state


def dense_entry(vec, config):
    idx = 0
    for s in config:
        idx = 2 * idx + s
    return vec[idx]


class TestFromDense:
    def test_product_state(self):
        psi = mps_from_dense(np.array([1.0, 0, 0, 0]))
        assert psi.bond_dims == (1, 1, 1)
        assert psi.amplitude((0, 0)) == pytest.approx(1.0)

    def test_ghz_bond_dims(self):
        vec = np.zeros(8)
        vec[0] = vec[7] = 1 / np.sqrt(2)
        psi = mps_from_dense(vec)
        assert psi.bond_dims == (1, 2, 2, 1)
        assert psi.amplitude((0, 0, 0)) == pytest.approx(1 / np.sqrt(2))

    def test_round_trip_exact(self):
        vec = random_state(6, seed=5)
        psi = mps_from_dense(vec)
        assert np.max(np.abs(psi.to_dense().reshape(-1) - vec)) <= 1e-12

    def test_round_trip_shaped_input(self):
        vec = random_state(4, seed=7).reshape((2,) * 4)
        psi = mps_from_dense(vec)
        assert np.max(np.abs(psi.to_dense() - vec)) <= 1e-12

    def test_zero_norm_rejected(self):
        with pytest.raises(InvalidInputError):
            mps_from_dense(np.zeros(8))

    def test_bad_length_rejected(self):
        with pytest.raises(ShapeError):
            mps_from_dense(np.ones(6))

    def test_truncation_cap(self):
        psi = mps_from_dense(random_state(6, seed=2), max_bond=3)
        assert psi.max_bond <= 3


class TestAmplitude:
    def test_ghz_support(self):
        ghz = make_ghz_mps(4)
        assert ghz.amplitude((0, 0, 0, 0)) == pytest.approx(1 / np.sqrt(2))
        assert ghz.amplitude((0, 1, 0, 0)) == 0

    def test_matches_dense_entries(self):
        vec = random_state(5, seed=11)
        psi = mps_from_dense(vec)
        for config in product(range(2), repeat=5):
            assert psi.amplitude(config) == pytest.approx(dense_entry(vec, config), abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ShapeError):
            make_ghz_mps(3).amplitude((0, 2, 0))

    def test_wrong_length(self):
        with pytest.raises(ShapeError):
            make_ghz_mps(3).amplitude((0, 0))


class TestPauliExpectation:
    def test_all_up_zz(self):
        up = product_mps([np.array([1.0, 0.0])] * 4)
        assert up.pauli_expectation("ZZZZ") == pytest.approx(1.0)

    def test_plus_state_zeros(self):
        plus = product_mps([np.array([1.0, 1.0]) / np.sqrt(2)] * 3)
        assert plus.pauli_expectation("XZX") == pytest.approx(0.0, abs=1e-12)
        assert plus.pauli_expectation("YXX") == pytest.approx(0.0, abs=1e-12)
        assert plus.pauli_expectation("XXX") == pytest.approx(1.0)

    def test_matches_kron_oracle(self, rng):
        vec = random_state(5, seed=21)
        psi = mps_from_dense(vec)
        for _ in range(25):
            labels = "".join(rng.choice(list("IXYZ")) for _ in range(5))
            oracle = np.real(vec.conj() @ kron_pauli(labels) @ vec)
            assert psi.pauli_expectation(labels) == pytest.approx(oracle, abs=1e-12)

    def test_unnormalized_rejected(self):
        bad = product_mps([np.array([2.0, 0.0])] * 3)
        with pytest.raises(InvalidInputError):
            bad.pauli_expectation("III")

    @pytest.mark.parametrize("length", [2, 3, 4, 5])
    def test_purity_identity(self, length):
        # sum over all Pauli strings of <P>^2 equals 2^L for any pure state
        vec = random_state(length, seed=31 + length)
        psi = mps_from_dense(vec)
        total = sum(
            psi.pauli_expectation(codes) ** 2
            for codes in product(range(4), repeat=length)
        )
        assert total == pytest.approx(2.0**length, abs=1e-8)


class TestSumAll:
    def test_ghz(self):
        assert make_ghz_mps(5).sum_all() == pytest.approx(np.sqrt(2))

    def test_plus_product(self):
        plus = product_mps([np.array([1.0, 1.0]) / np.sqrt(2)] * 6)
        assert plus.sum_all() == pytest.approx(2.0**3)

    def test_matches_enumeration(self):
        vec = random_state(6, seed=41)
        psi = mps_from_dense(vec)
        assert psi.sum_all() == pytest.approx(vec.sum(), abs=1e-12)


class TestCanonicalForms:
    def test_canonicalize_isometries(self):
        psi = mps_from_dense(random_state(6, seed=51))
        for center in (0, 3, 5):
            canon = psi.canonicalize(center)
            assert canon.check_isometries() <= 1e-10
            assert canon.norm() == pytest.approx(psi.norm(), abs=1e-12)

    def test_from_dense_is_canonical(self):
        psi = mps_from_dense(random_state(5, seed=52))
        assert psi.canonical_center == 4
        assert psi.check_isometries() <= 1e-10

    def test_inner_ghz(self):
        assert make_ghz_mps(6).inner(make_ghz_mps(6)) == pytest.approx(1.0)

    def test_inner_matches_dense(self):
        u, v = random_state(4, seed=61), random_state(4, seed=62)
        pu, pv = mps_from_dense(u), mps_from_dense(v)
        assert pu.inner(pv) == pytest.approx(np.vdot(u, v), abs=1e-12)

    def test_compress_error_is_schmidt_tail(self):
        vec = random_state(8, seed=71)
        psi = mps_from_dense(vec)
        keep = 8
        small = psi.compress(max_bond=keep)
        assert small.max_bond <= keep
        assert small.check_isometries() <= 1e-10
        # oracle: squared error = sum of squared discarded Schmidt values at
        # the dominant (middle) cut is a lower bound; the full truncation error
        # is bounded by the root of all discarded weights
        err = np.linalg.norm(small.to_dense().reshape(-1) - vec)
        total_tail = 0.0
        for cut in range(1, 8):
            s = np.linalg.svd(vec.reshape(2**cut, -1), compute_uv=False)
            total_tail += float(np.sum(s[keep:] ** 2))
        assert err <= np.sqrt(total_tail) + 1e-12
        mid = np.linalg.svd(vec.reshape(16, 16), compute_uv=False)
        assert err >= np.sqrt(np.sum(mid[keep:] ** 2)) - 1e-12

    def test_normalized_after_truncation(self):
        psi = mps_from_dense(random_state(8, seed=72), max_bond=6).normalized()
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)


class TestValidation:
    def test_bond_mismatch(self):
        with pytest.raises(ShapeError):
            MatrixProductState([np.ones((1, 2, 3)), np.ones((2, 2, 1))])

    def test_boundary_bonds(self):
        with pytest.raises(ShapeError):
            MatrixProductState([np.ones((2, 2, 1))])

    def test_mixed_phys_dims_rejected(self):
        with pytest.raises(ShapeError):
            MatrixProductState([np.ones((1, 2, 1)), np.ones((1, 4, 1))])

    def test_sites_immutable(self):
        psi = make_ghz_mps(3)
        with pytest.raises(ValueError):
            psi.sites[0][0, 0, 0] = 5.0
