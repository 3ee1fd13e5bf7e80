import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losrkit import (
    Bipartition,
    DensityMatrix,
    LocalChannelFamily,
    PureState,
    SchmidtSpectrum,
    all_bipartitions,
    apply_channel,
    born_box,
    catalog,
    group_parties,
    is_no_signaling,
    load_state,
    partial_trace,
    permute_parties,
    save_state,
    schmidt_rank,
    schmidt_spectrum,
    tensor_product,
)
from conftest import random_density, random_pure

AB = Bipartition(frozenset({0}), 2)


def bip(left, n):
    return Bipartition(frozenset(left), n)


class TestConstruction:
    def test_norm_repair_warns(self):
        with pytest.warns(UserWarning):
            psi = PureState((2,), np.array([1.0 + 5e-4, 0.0]))
        assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-12

    def test_norm_too_far_raises(self):
        with pytest.raises(ValueError):
            PureState((2,), np.array([1.1, 0.0]))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            PureState((2, 2), np.array([1.0, 0.0]))

    def test_empty_dims(self):
        with pytest.raises(ValueError):
            PureState((), np.array([1.0]))

    def test_density_invariants(self, rng):
        with pytest.raises(ValueError):
            DensityMatrix((2,), np.array([[0.5, 0.5], [0.0, 0.5]]))  # not Hermitian
        with pytest.raises(ValueError):
            DensityMatrix((2,), np.eye(2))  # trace 2
        with pytest.raises(ValueError):
            DensityMatrix((2,), np.diag([1.5, -0.5]))  # negative eigenvalue

    def test_spectrum_invariants(self):
        spec = SchmidtSpectrum(np.array([0.25, 0.5, 0.25]))
        assert list(spec.values) == [0.5, 0.25, 0.25]
        with pytest.raises(ValueError):
            SchmidtSpectrum(np.array([0.9, 0.2]))


class TestBipartition:
    def test_parse_and_label(self):
        beta = Bipartition.parse("A|BC", 3)
        assert beta.left == frozenset({0})
        assert beta.label() == "A|BC"
        assert Bipartition.parse("CA|B", 3).left == frozenset({0, 2})

    def test_parse_rejects_bad_partitions(self):
        with pytest.raises(ValueError):
            Bipartition.parse("A|B", 3)
        with pytest.raises(ValueError):
            Bipartition.parse("AB|BC", 3)
        with pytest.raises(ValueError):
            Bipartition.parse("ABC", 3)

    def test_all_bipartitions_count(self):
        assert len(all_bipartitions(2)) == 1
        assert len(all_bipartitions(3)) == 3
        assert len(all_bipartitions(4)) == 7

    def test_singleton(self):
        assert bip({0}, 3).singleton() == 0
        assert bip({0, 1}, 3).singleton() == 2
        assert bip({0, 1}, 4).singleton() is None


class TestTensorAndPermute:
    def test_basis_product(self):
        zero = PureState((2,), np.array([1.0, 0.0]))
        prod = tensor_product(zero, zero)
        assert prod.party_dims == (2, 2)
        assert np.allclose(prod.amplitudes, [1, 0, 0, 0])

    def test_trivial_party_is_identity(self, rng):
        psi = random_pure(rng, (2, 2))
        triv = PureState((1,), np.array([1.0]))
        out = tensor_product(psi, triv)
        assert out.party_dims == (2, 2, 1)
        assert np.allclose(out.amplitudes, psi.amplitudes)

    def test_two_bell_from_phi_plus_pair(self):
        # phi+ (A1,B) x phi+ (A2,C), reordered to (A1,A2,B,C), grouped (A1A2|B|C)
        joint = tensor_product(catalog.phi_plus(), catalog.phi_plus())
        regrouped = group_parties(permute_parties(joint, (0, 2, 1, 3)), [(0, 1), (2,), (3,)])
        assert regrouped.party_dims == (4, 2, 2)
        assert np.allclose(regrouped.amplitudes, catalog.two_bell().amplitudes)

    def test_permute_roundtrip(self, rng):
        psi = random_pure(rng, (2, 3, 2))
        back = permute_parties(permute_parties(psi, (2, 0, 1)), (1, 2, 0))
        assert np.allclose(back.amplitudes, psi.amplitudes)

    def test_permute_density_matches_pure(self, rng):
        psi = random_pure(rng, (2, 3))
        swapped = permute_parties(psi, (1, 0))
        assert np.allclose(
            permute_parties(psi.density(), (1, 0)).matrix, swapped.density().matrix
        )


class TestPartialTrace:
    def test_phi_plus_marginal_maximally_mixed(self):
        red = partial_trace(catalog.phi_plus().density(), [0])
        assert np.allclose(red.matrix, np.eye(2) / 2)

    def test_product_state_reduces_pure(self, rng):
        psi = random_pure(rng, (2,))
        chi = random_pure(rng, (3,))
        rho = tensor_product(psi, chi).density()
        red = partial_trace(rho, [0])
        assert np.allclose(red.matrix, psi.density().matrix, atol=1e-12)

    def test_ghz_keep_first(self):
        red = partial_trace(catalog.ghz().density(), [0])
        assert np.allclose(red.matrix, np.diag([0.5, 0.5]))

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(catalog.ghz().density(), [])

    def test_trace_and_hermiticity_preserved(self, rng):
        for dims in [(2, 2), (2, 4, 2), (4, 4, 4)]:
            rho = random_density(rng, dims)
            keep = [0, len(dims) - 1] if len(dims) > 1 else [0]
            red = partial_trace(rho, keep)
            assert abs(np.trace(red.matrix) - 1.0) < 1e-12
            assert np.max(np.abs(red.matrix - red.matrix.conj().T)) < 1e-12


class TestSchmidtSpectrum:
    def test_phi_plus(self):
        spec = schmidt_spectrum(catalog.phi_plus(), AB)
        assert np.allclose(spec.values, [0.5, 0.5], atol=1e-12)

    def test_two_bell_regression(self):
        tb = catalog.two_bell()
        assert np.allclose(schmidt_spectrum(tb, bip({0}, 3)).values, [0.25] * 4, atol=1e-9)
        for left in ({0, 1}, {0, 2}):
            vals = schmidt_spectrum(tb, bip(left, 3)).truncated()
            assert np.allclose(vals, [0.5, 0.5], atol=1e-9)

    def test_chiral_all_bipartitions(self):
        psi = catalog.chiral()
        hi = 0.5 + np.sqrt(5 / 32)
        lo = 0.5 - np.sqrt(5 / 32)
        for beta in all_bipartitions(3):
            vals = schmidt_spectrum(psi, beta).truncated()
            assert np.allclose(vals, [hi, lo], atol=1e-9)

    def test_left_side_length_with_padding(self, rng):
        # left side dim 4, right dim 2: two genuine zeros retained
        psi = random_pure(rng, (4, 2))
        spec = schmidt_spectrum(psi, AB)
        assert len(spec) == 4
        assert schmidt_rank(spec) <= 2

    def test_rank_examples(self):
        assert schmidt_rank(SchmidtSpectrum(np.array([0.5, 0.5]))) == 2
        assert schmidt_rank(SchmidtSpectrum(np.array([1.0]))) == 1
        assert schmidt_rank(SchmidtSpectrum(np.array([0.25] * 4))) == 4
        with pytest.raises(ValueError):
            schmidt_rank(SchmidtSpectrum(np.array([1.0])), tau_rank=0.0)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 3))
    def test_complement_spectra_agree(self, seed, n):
        rng = np.random.default_rng(seed)
        dims = tuple(int(rng.integers(2, 4)) for _ in range(n))
        psi = random_pure(rng, dims)
        for beta in all_bipartitions(n):
            left = schmidt_spectrum(psi, beta).truncated(1e-12)
            comp = Bipartition(beta.right, n)
            right = schmidt_spectrum(psi, comp).truncated(1e-12)
            assert abs(left.sum() - 1.0) < 1e-9
            assert len(left) == len(right)
            assert np.allclose(left, right, atol=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_tensor_spectrum_is_tensor_of_spectra(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_pure(rng, (int(rng.integers(2, 5)), int(rng.integers(2, 5))))
        chi = random_pure(rng, (2, 2))
        joint = tensor_product(psi, chi)  # parties (A1, B1, A2, B2)
        beta = Bipartition(frozenset({0, 2}), 4)
        got = schmidt_spectrum(joint, beta).truncated(1e-12)
        expect = np.sort(
            np.kron(
                schmidt_spectrum(psi, AB).values, schmidt_spectrum(chi, AB).values
            )
        )[::-1]
        expect = expect[expect > 1e-12]
        assert np.allclose(got, expect, atol=1e-9)


def depolarizing_kraus(d: int = 2):
    paulis = [
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    return tuple(p / 2 for p in paulis)


class TestChannels:
    def test_identity(self, rng):
        rho = random_density(rng, (2, 2))
        out = apply_channel(rho, LocalChannelFamily.identity((2, 2)))
        assert np.allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_full_depolarizing_on_phi_plus(self):
        ch = LocalChannelFamily.from_local_kraus((depolarizing_kraus(), depolarizing_kraus()))
        out = apply_channel(catalog.phi_plus().density(), ch)
        assert np.allclose(out.matrix, np.eye(4) / 4, atol=1e-12)

    def test_dimension_mismatch(self):
        ch = LocalChannelFamily.identity((2, 2))
        with pytest.raises(ValueError):
            apply_channel(catalog.ghz().density(), ch)

    def test_incomplete_kraus_rejected(self):
        half = (np.eye(2, dtype=complex) / 2,)
        with pytest.raises(ValueError):
            LocalChannelFamily.from_local_kraus((half, (np.eye(2, dtype=complex),)))

    def test_weights_must_sum_to_one(self):
        eye = (np.eye(2, dtype=complex),)
        with pytest.raises(ValueError):
            LocalChannelFamily(((0.5, (eye,)),))


class TestBornBox:
    def test_phi_plus_computational(self):
        z0 = np.diag([1.0, 0.0]).astype(complex)
        z1 = np.diag([0.0, 1.0]).astype(complex)
        meas = [[[z0, z1], [z0, z1]], [[z0, z1], [z0, z1]]]
        box = born_box(catalog.phi_plus().density(), meas)
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    for b in range(2):
                        expect = 0.5 if a == b else 0.0
                        assert abs(box.table[x, y, a, b] - expect) < 1e-12

    def test_product_state_box_factorizes(self, rng):
        psi = tensor_product(random_pure(rng, (2,)), random_pure(rng, (2,)))
        box = born_box(psi.density(), catalog.xy_measurements(2))
        for x in range(2):
            for y in range(2):
                joint = box.table[x, y]
                pa = joint.sum(axis=1)
                pb = joint.sum(axis=0)
                assert np.allclose(joint, np.outer(pa, pb), atol=1e-10)

    def test_random_boxes_no_signaling(self, rng):
        for _ in range(8):
            rho = random_density(rng, (2, 2))
            vecs = rng.standard_normal((2, 2, 3))
            vecs /= np.linalg.norm(vecs, axis=-1, keepdims=True)
            from losrkit import MeasurementFamily

            box = born_box(rho, MeasurementFamily.from_bloch(vecs))
            assert is_no_signaling(box, 1e-10)

    def test_non_complete_povm_rejected(self):
        z0 = np.diag([1.0, 0.0]).astype(complex)
        meas = [[[z0, z0]], [[z0, z0]]]
        with pytest.raises(ValueError):
            born_box(catalog.phi_plus().density(), meas)


class TestCatalog:
    def test_defining_formulas_exact(self):
        r = 1 / np.sqrt(2)
        assert np.array_equal(catalog.phi_plus().amplitudes, np.array([r, 0, 0, r]))
        g = catalog.ghz().amplitudes
        assert g[0] == r and g[7] == r and np.all(g[1:7] == 0)
        th = 0.3
        assert np.allclose(
            catalog.partial(th).amplitudes, [np.cos(th), 0, 0, np.sin(th)], atol=0
        )
        assert abs(np.linalg.norm(catalog.chiral().amplitudes) - 1.0) < 1e-15

    def test_resolve_names_and_aliases(self):
        assert catalog.resolve("phi_plus").party_dims == (2, 2)
        assert catalog.resolve("partial(0.25)").party_dims == (2, 2)
        assert catalog.resolve("max_entangled(3)").party_dims == (3, 3)
        chi = catalog.resolve("chiral_appendix_d")
        assert np.array_equal(chi.amplitudes, catalog.chiral().amplitudes)
        from losrkit.boxes import Box

        assert isinstance(catalog.resolve("pr_box"), Box)
        with pytest.raises(KeyError):
            catalog.resolve("does_not_exist")

    def test_state_with_spectrum(self):
        psi = catalog.state_with_spectrum([0.7, 0.2, 0.1])
        spec = schmidt_spectrum(psi, Bipartition(frozenset({0}), 2))
        assert np.allclose(spec.values, [0.7, 0.2, 0.1], atol=1e-12)


class TestStateFiles:
    def test_pure_roundtrip(self, tmp_path, rng):
        psi = random_pure(rng, (2, 3))
        path = tmp_path / "state.txt"
        save_state(path, psi)
        back = load_state(path)
        assert isinstance(back, PureState)
        assert back.party_dims == psi.party_dims
        assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-15)

    def test_density_roundtrip(self, tmp_path, rng):
        rho = random_density(rng, (2, 2))
        path = tmp_path / "rho.txt"
        save_state(path, rho)
        back = load_state(path)
        assert isinstance(back, DensityMatrix)
        assert np.allclose(back.matrix, rho.matrix, atol=1e-15)

    def test_literal_file(self, tmp_path):
        path = tmp_path / "bell.txt"
        r = float(1 / np.sqrt(2))
        path.write_text(f"2 2\n{r!r} 0.0\n0.0 0.0\n0.0 0.0\n{r!r} 0.0\n")
        psi = load_state(path)
        assert np.allclose(psi.amplitudes, catalog.phi_plus().amplitudes)

    def test_bad_entry_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n1.0 0.0\n0.0 0.0\n")
        with pytest.raises(ValueError):
            load_state(path)
