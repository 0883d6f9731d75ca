import numpy as np
import pytest

from diamondrec import choi
from diamondrec.linalg import BipartiteOperator, ShapeError, frobenius, vec


def rand_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestChoiOfApply:
    def test_identity_map(self):
        m = choi.choi_of_apply(lambda x: x, 2, 2)
        v = vec(np.eye(2))
        assert np.allclose(m.choi.mat, np.outer(v, v.conj()))

    def test_two_sided_multiplication_is_rank_one(self):
        rng = np.random.default_rng(0)
        u = choi.random_unitary(3, rng)
        v = choi.random_unitary(3, rng)
        m = choi.choi_of_apply(lambda x: u @ x @ v, 3, 3)
        s = np.linalg.svd(m.choi.mat, compute_uv=False)
        assert s[1] < 1e-12 * s[0]
        expected = np.outer(vec(u), vec(v.T))
        assert np.allclose(m.choi.mat, expected, atol=1e-12)
        assert np.allclose(m.choi.mat, choi.map_of_unitary_pair(u, v).choi.mat)

    def test_trace_to_identity_map(self):
        dim_w = 3
        m = choi.choi_of_apply(lambda x: np.trace(x) * np.eye(dim_w) / dim_w, 2, dim_w)
        assert np.allclose(m.choi.mat, np.eye(2 * dim_w) / dim_w)

    def test_shape_error_on_bad_image(self):
        with pytest.raises(ShapeError):
            choi.choi_of_apply(lambda x: np.eye(3), 2, 2)


class TestApplyMap:
    def test_identity_round_trip(self):
        rng = np.random.default_rng(1)
        m = choi.choi_of_apply(lambda x: x, 3, 3)
        rho = rand_complex(rng, 3, 3)
        assert np.allclose(choi.apply_map(m, rho), rho)

    def test_two_sided_multiplication(self):
        rng = np.random.default_rng(2)
        u = choi.random_unitary(2, rng)
        v = choi.random_unitary(2, rng)
        m = choi.map_of_unitary_pair(u, v)
        x = rand_complex(rng, 2, 2)
        assert np.allclose(choi.apply_map(m, x), u @ x @ v, atol=1e-12)

    def test_kraus_channel_application(self):
        rng = np.random.default_rng(3)
        ops = tuple(rand_complex(rng, 2, 3) for _ in range(2))
        m = choi.kraus_to_choi(choi.KrausSet(ops))
        rho = rand_complex(rng, 3, 3)
        direct = sum(k @ rho @ k.conj().T for k in ops)
        assert np.allclose(choi.apply_map(m, rho), direct, atol=1e-12)

    def test_round_trip_on_operator_basis(self):
        rng = np.random.default_rng(4)
        u = choi.random_unitary(2, rng)
        original = lambda x: u @ x  # noqa: E731
        m = choi.choi_of_apply(original, 2, 2)
        for i in range(2):
            for j in range(2):
                e = choi.basis_matrix(i, j, 2)
                assert np.allclose(choi.apply_map(m, e), original(e), atol=1e-9)


class TestKrausToChoi:
    def test_single_identity(self):
        m = choi.kraus_to_choi(choi.KrausSet((np.eye(2),)))
        v = vec(np.eye(2))
        assert np.allclose(m.choi.mat, np.outer(v, v.conj()))

    def test_single_unitary_rank_and_trace(self):
        rng = np.random.default_rng(5)
        u = choi.random_unitary(3, rng)
        m = choi.kraus_to_choi(choi.KrausSet((u,)))
        s = np.linalg.svd(m.choi.mat, compute_uv=False)
        assert s[1] < 1e-12 * s[0]
        assert np.trace(m.choi.mat).real == pytest.approx(3.0)

    def test_matches_choi_of_kraus_sum(self):
        rng = np.random.default_rng(6)
        ops = tuple(rand_complex(rng, 2, 2) for _ in range(2))
        m1 = choi.kraus_to_choi(choi.KrausSet(ops))
        m2 = choi.choi_of_apply(lambda x: sum(k @ x @ k.conj().T for k in ops), 2, 2)
        assert np.allclose(m1.choi.mat, m2.choi.mat, atol=1e-12)

    def test_psd(self):
        rng = np.random.default_rng(7)
        ops = tuple(rand_complex(rng, 3, 2) for _ in range(3))
        m = choi.kraus_to_choi(choi.KrausSet(ops))
        assert np.linalg.eigvalsh(m.choi.mat)[0] >= -1e-12


class TestIsCpt:
    def test_identity_channel(self):
        m = choi.choi_of_apply(lambda x: x, 2, 2)
        assert choi.is_cpt(m) == {"cp": True, "tp": True}

    def test_two_sided_non_channel(self):
        rng = np.random.default_rng(8)
        u = choi.random_unitary(2, rng)
        v = choi.random_unitary(2, rng)
        m = choi.map_of_unitary_pair(u, v)
        flags = choi.is_cpt(m)
        assert not flags["cp"]
        assert not flags["tp"]

    def test_random_channel_is_cpt(self):
        rng = np.random.default_rng(9)
        m = choi.random_channel(3, 2, 2, rng)
        assert choi.is_cpt(m) == {"cp": True, "tp": True}


class TestRandomUnitary:
    def test_scalar_case(self):
        rng = np.random.default_rng(10)
        u = choi.random_unitary(1, rng)
        assert abs(abs(u[0, 0]) - 1.0) < 1e-12

    def test_unitarity_many_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            u = choi.random_unitary(n, rng)
            assert frobenius(u @ u.conj().T - np.eye(n)) <= 1e-10

    def test_haar_first_entry_moment(self):
        # E |U_11|^2 = 1/n for Haar measure; 10^4 draws, 5 sigma band
        rng = np.random.default_rng(12)
        n, draws = 3, 10_000
        vals = np.array([abs(choi.random_unitary(n, rng)[0, 0]) ** 2 for _ in range(draws)])
        se = vals.std(ddof=1) / np.sqrt(draws)
        assert abs(vals.mean() - 1.0 / n) <= 5.0 * se

    def test_orthogonal_draws_are_real(self):
        rng = np.random.default_rng(13)
        q = choi.random_orthogonal(4, rng)
        assert np.abs(q.imag).max() == 0.0
        assert frobenius(q @ q.T - np.eye(4)) <= 1e-10


class TestRandomChannel:
    def test_unit_kraus_rank_is_unitary(self):
        rng = np.random.default_rng(14)
        m = choi.random_channel(3, 3, 1, rng)
        s = np.linalg.svd(m.choi.mat, compute_uv=False)
        assert s[1] < 1e-10 * s[0]
        # the single Kraus operator of a rank-one channel must be unitary
        top = np.linalg.eigh(m.choi.mat)[1][:, -1] * np.sqrt(3.0)
        k = top.reshape(3, 3)
        assert frobenius(k @ k.conj().T - np.eye(3)) < 1e-9

    def test_choi_rank_matches(self):
        rng = np.random.default_rng(15)
        m = choi.random_channel(2, 2, 2, rng)
        assert choi.is_cpt(m) == {"cp": True, "tp": True}
        s = np.linalg.svd(m.choi.mat, compute_uv=False)
        assert s[1] > 1e-6 and s[2] < 1e-10

    def test_choi_trace_is_input_dimension(self):
        rng = np.random.default_rng(16)
        for r in (2, 3, 4):
            m = choi.random_channel(4, 2, r, rng)
            assert np.trace(m.choi.mat).real == pytest.approx(4.0, abs=1e-9)

    def test_infeasible_isometry(self):
        rng = np.random.default_rng(17)
        with pytest.raises(ShapeError):
            choi.random_channel(5, 2, 2, rng)


class TestChoiInverseComposition:
    def test_on_spanning_set_of_maps(self):
        rng = np.random.default_rng(18)
        for _ in range(5):
            k = rand_complex(rng, 2, 2)
            c = rand_complex(rng, 2, 2)
            original = lambda x, k=k, c=c: k @ x @ k.conj().T + c @ x.T @ c.T  # noqa: E731
            m = choi.choi_of_apply(original, 2, 2)
            for i in range(2):
                for j in range(2):
                    e = choi.basis_matrix(i, j, 2)
                    assert np.allclose(choi.apply_map(m, e), original(e), atol=1e-9)

    def test_tp_iff_partial_trace_identity(self):
        rng = np.random.default_rng(19)
        m = choi.random_channel(3, 4, 2, rng)
        from diamondrec.linalg import partial_trace_first

        assert frobenius(partial_trace_first(m.choi) - np.eye(3)) <= 1e-9
