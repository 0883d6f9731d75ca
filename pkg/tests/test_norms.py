import numpy as np
import pytest

from diamondrec import norms
from diamondrec.choi import OperatorMap, map_of_unitary_pair, random_channel, random_unitary
from diamondrec.conic import SolveOptions
from diamondrec.linalg import (
    BipartiteOperator,
    ShapeError,
    frobenius,
    nuclear_norm,
    spectral_norm,
)

FAST = SolveOptions(tol=1e-8, max_iters=50000)


def rand_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def rank_one_corner(n=2):
    x = np.zeros((n * n, n * n), dtype=complex)
    x[0, 0] = 1.0
    return BipartiteOperator(x, n, n)


class TestSquareNorm:
    def test_trivial_second_factor_gives_nuclear_norm(self):
        rng = np.random.default_rng(0)
        x = rand_complex(rng, 3, 3)
        rep = norms.square_norm(BipartiteOperator(x, 3, 1), opts=FAST)
        assert rep.value == pytest.approx(nuclear_norm(x), abs=1e-6)

    def test_maximally_entangled_projector(self):
        m = map_of_unitary_pair(np.eye(2), np.eye(2))
        rep = norms.square_norm(m.choi, opts=FAST)
        assert rep.value == pytest.approx(2.0, abs=1e-6)

    def test_product_corner_saturates_dimension_bound(self):
        x = rank_one_corner(2)
        # brute-force witness in the variational form: concentrating both
        # factors on the first basis vector attains dim_v * nuclear norm
        a_star = np.sqrt(2.0) * np.diag([1.0, 0.0]).astype(complex)
        attained = norms.sandwiched_nuclear_norm(x, a_star, a_star)
        assert attained == pytest.approx(2.0, abs=1e-12)
        rep = norms.square_norm(x, opts=FAST)
        assert rep.value == pytest.approx(2.0, abs=1e-6)

    def test_report_invariants(self):
        rng = np.random.default_rng(1)
        x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
        rep = norms.square_norm(x, opts=FAST)
        assert rep.gap <= 1e-6 * (1.0 + rep.value)
        n = x.dim
        big = np.block([[rep.dual_y, -x.mat], [-x.mat.conj().T, rep.dual_z]])
        assert np.linalg.eigvalsh((big + big.conj().T) / 2)[0] >= -1e-6
        assert rep.value >= nuclear_norm(x.mat) - 1e-6

    def test_primal_witnesses_are_feasible(self):
        rng = np.random.default_rng(2)
        x = BipartiteOperator(rand_complex(rng, 6, 6), 3, 2)
        rep = norms.square_norm(x, opts=FAST)
        assert np.trace(rep.primal_rho).real == pytest.approx(x.dim_v, abs=1e-6)
        assert np.trace(rep.primal_sigma).real == pytest.approx(x.dim_v, abs=1e-6)
        blk = np.block(
            [
                [np.kron(np.eye(x.dim_w), rep.primal_rho), rep.primal_z],
                [rep.primal_z.conj().T, np.kron(np.eye(x.dim_w), rep.primal_sigma)],
            ]
        )
        assert np.linalg.eigvalsh((blk + blk.conj().T) / 2)[0] >= -1e-6
        assert rep.primal_value == pytest.approx(rep.value, abs=1e-6 * (1 + rep.value))

    def test_agrees_with_direct_max_form_solve(self):
        rng = np.random.default_rng(3)
        x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
        value, _, res = norms.square_norm_primal(x, opts=FAST)
        assert res.status == "optimal"
        assert value == pytest.approx(norms.square_norm(x, opts=FAST).value, abs=1e-5)

    def test_norm_axioms_sampled(self):
        rng = np.random.default_rng(4)
        x = rand_complex(rng, 4, 4)
        y = rand_complex(rng, 4, 4)
        nx = norms.square_norm(BipartiteOperator(x, 2, 2), opts=FAST).value
        ny = norms.square_norm(BipartiteOperator(y, 2, 2), opts=FAST).value
        nxy = norms.square_norm(BipartiteOperator(x + y, 2, 2), opts=FAST).value
        nsc = norms.square_norm(BipartiteOperator(-2.5j * x, 2, 2), opts=FAST).value
        assert nxy <= nx + ny + 1e-6 * (1 + nx + ny)
        assert nsc == pytest.approx(2.5 * nx, rel=1e-6, abs=1e-6)


class TestDiamondNorm:
    def test_zero_map(self):
        m = OperatorMap(BipartiteOperator(np.zeros((4, 4)), 2, 2))
        assert norms.diamond_norm(m, opts=FAST) == pytest.approx(0.0, abs=1e-8)

    def test_identity_channel(self):
        for n in (2, 3):
            m = map_of_unitary_pair(np.eye(n), np.eye(n))
            assert norms.diamond_norm(m, opts=FAST) == pytest.approx(1.0, abs=1e-6)

    def test_random_channels_have_unit_norm(self):
        rng = np.random.default_rng(5)
        for rank in (1, 2, 3, 4):
            m = random_channel(3, 3, rank, rng)
            assert norms.diamond_norm(m, opts=FAST) == pytest.approx(1.0, abs=1e-6)


class TestCheckBounds:
    def test_extremal_point_saturates_lower_bound(self):
        m = map_of_unitary_pair(np.eye(2), np.eye(2))
        rep = norms.check_bounds(m.choi, opts=FAST)
        assert rep.slack_nuclear_below == pytest.approx(0.0, abs=1e-6)
        assert rep.holds()

    def test_corner_saturates_dimension_bound(self):
        rep = norms.check_bounds(rank_one_corner(2), opts=FAST)
        assert rep.slack_dim_times_nuclear == pytest.approx(0.0, abs=1e-6)
        assert rep.holds()

    def test_random_operators(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
            assert norms.check_bounds(x, opts=FAST).holds(1e-7)


class TestExtremality:
    def test_unitary_pair_choi_is_extremal(self):
        rng = np.random.default_rng(7)
        m = map_of_unitary_pair(random_unitary(2, rng), random_unitary(2, rng))
        rep = norms.extremality_check(m.choi)
        assert rep.extremal and rep.residual <= 1e-10

    def test_zero_operator_is_extremal(self):
        rep = norms.extremality_check(BipartiteOperator(np.zeros((4, 4)), 2, 2))
        assert rep.extremal and rep.residual == 0.0

    def test_corner_is_not_extremal(self):
        rep = norms.extremality_check(rank_one_corner(2))
        assert not rep.extremal
        assert rep.residual == pytest.approx(np.sqrt(2.0), abs=1e-9)

    def test_extremal_implies_square_equals_nuclear(self):
        rng = np.random.default_rng(8)
        m = map_of_unitary_pair(random_unitary(3, rng), random_unitary(3, rng))
        rep = norms.square_norm(m.choi, opts=FAST)
        assert abs(rep.value - nuclear_norm(m.choi.mat)) <= 1e-6 * nuclear_norm(m.choi.mat)


class TestVerifyOptimalPoints:
    def test_identity_channel_objectives(self):
        m = map_of_unitary_pair(np.eye(2), np.eye(2))
        rep = norms.verify_optimal_points(m.choi)
        assert rep.primal_objective == pytest.approx(2.0, abs=1e-8)
        assert rep.dual_objective == pytest.approx(2.0, abs=1e-8)
        assert rep.max_residual() <= 1e-8

    def test_random_unitary_pair_n3(self):
        rng = np.random.default_rng(9)
        m = map_of_unitary_pair(random_unitary(3, rng), random_unitary(3, rng))
        rep = norms.verify_optimal_points(m.choi)
        assert rep.max_residual() <= 1e-8

    def test_positive_scaling_preserves_everything(self):
        rng = np.random.default_rng(10)
        m = map_of_unitary_pair(random_unitary(2, rng), random_unitary(2, rng))
        scaled = BipartiteOperator(7.5 * m.choi.mat, 2, 2)
        assert norms.extremality_check(scaled).extremal
        rep = norms.verify_optimal_points(scaled)
        assert rep.max_residual() <= 1e-8
        assert rep.primal_objective == pytest.approx(7.5 * 2.0, abs=1e-7)

    def test_rejects_non_extremal_input(self):
        with pytest.raises(ShapeError):
            norms.verify_optimal_points(rank_one_corner(2))


class TestVariationalLowerBound:
    def test_single_sample_is_nuclear_norm(self):
        rng = np.random.default_rng(11)
        x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
        assert norms.variational_lower_bound(x, 1, rng) == pytest.approx(
            nuclear_norm(x.mat)
        )

    def test_extremal_point_needs_no_samples(self):
        rng = np.random.default_rng(12)
        m = map_of_unitary_pair(random_unitary(2, rng), random_unitary(2, rng))
        bound = norms.variational_lower_bound(m.choi, 1, rng)
        sq = norms.square_norm(m.choi, opts=FAST).value
        assert bound == pytest.approx(sq, abs=1e-6)

    def test_corner_approached_from_below(self):
        rng = np.random.default_rng(13)
        x = rank_one_corner(2)
        few = norms.variational_lower_bound(x, 5, np.random.default_rng(13))
        many = norms.variational_lower_bound(x, 400, np.random.default_rng(13))
        assert nuclear_norm(x.mat) - 1e-12 <= few <= many <= 2.0 + 1e-9
        assert many > 1.2  # random sandwiches beat the identity pair here

    def test_sandwich_chain(self):
        rng = np.random.default_rng(14)
        for dims in ((2, 2), (2, 3)):
            for _ in range(5):
                n = dims[0] * dims[1]
                x = BipartiteOperator(rand_complex(rng, n, n), *dims)
                vlb = norms.variational_lower_bound(x, 20, rng)
                sq = norms.square_norm(x, opts=FAST).value
                nn = nuclear_norm(x.mat)
                assert nn - 1e-6 <= vlb <= sq + 1e-6
                assert sq <= dims[1] * nn + 1e-6

    def test_requires_at_least_one_sample(self):
        rng = np.random.default_rng(15)
        with pytest.raises(ValueError):
            norms.variational_lower_bound(rank_one_corner(2), 0, rng)
