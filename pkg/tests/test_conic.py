import numpy as np
import pytest

from diamondrec import conic
from diamondrec.conic import (
    ConeSeg,
    ProgramBuilder,
    SolveOptions,
    VarLayout,
    build_standard_sdp,
    embed_complex,
    hmat,
    hvec,
    smat,
    solve,
    svec,
    verify_kkt,
)
from diamondrec.conic.build import block_pair_entries
from diamondrec.linalg import BipartiteOperator, ShapeError, frobenius
from diamondrec.norms import watrous_standard_sdp


def rand_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def rand_hermitian(rng, n):
    g = rand_complex(rng, n, n)
    return (g + g.conj().T) / 2


def psd_boundary_program():
    # minimize t subject to [[t, 1], [1, t]] PSD; optimum t = 1
    layout = VarLayout()
    t = layout.add_reals("t")
    builder = ProgramBuilder(layout)
    builder.add_objective_term(t.start, 1.0)
    g0 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    builder.add_psd_complex(2, g0, [(t.start, 0, 0, 1.0), (t.start, 1, 1, 1.0)])
    return builder.build()


def nuclear_norm_program(x):
    n = x.shape[0]
    layout = VarLayout()
    yh = layout.add_hermitian("Y", n)
    zh = layout.add_hermitian("Z", n)
    builder = ProgramBuilder(layout)
    for q in range(n):
        builder.add_objective_term(yh.start + q, 0.5)
        builder.add_objective_term(zh.start + q, 0.5)
    g0 = np.zeros((2 * n, 2 * n), dtype=complex)
    g0[:n, n:] = -x
    g0[n:, :n] = -x.conj().T
    builder.add_psd_complex(
        2 * n, g0, block_pair_entries(layout, yh, 0, 0) + block_pair_entries(layout, zh, n, n)
    )
    return builder.build()


class TestSvecSmat:
    def test_round_trip_and_isometry(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal((5, 5))
        s = s + s.T
        t = rng.standard_normal((5, 5))
        t = t + t.T
        assert np.allclose(smat(svec(s), 5), s)
        assert svec(s) @ svec(t) == pytest.approx(np.sum(s * t))


class TestEmbedComplex:
    def test_real_symmetric_becomes_block_diagonal(self):
        s = np.array([[2.0, 1.0], [1.0, 3.0]])
        e = embed_complex(s)
        assert np.allclose(e, np.block([[s, np.zeros((2, 2))], [np.zeros((2, 2)), s]]))

    def test_pauli_y_spectrum(self):
        h = np.array([[0.0, -1j], [1j, 0.0]])
        w = np.linalg.eigvalsh(embed_complex(h))
        assert np.allclose(w, [-1.0, -1.0, 1.0, 1.0])

    def test_min_eigenvalue_preserved(self):
        rng = np.random.default_rng(1)
        h = rand_hermitian(rng, 4)
        w_h = np.linalg.eigvalsh(h)
        w_e = np.linalg.eigvalsh(embed_complex(h))
        assert w_e[0] == pytest.approx(w_h[0])
        assert np.allclose(np.repeat(w_h, 2), w_e)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ShapeError):
            embed_complex(np.array([[0.0, 1.0], [2.0, 0.0]]))


class TestSolve:
    def test_psd_boundary(self):
        res = solve(psd_boundary_program(), SolveOptions(tol=1e-9))
        assert res.status == "optimal"
        assert res.primal_value == pytest.approx(1.0, abs=1e-7)

    def test_nuclear_norm_sdp(self):
        res = solve(nuclear_norm_program(np.diag([1.0, -2.0]).astype(complex)))
        assert res.status == "optimal"
        assert res.primal_value == pytest.approx(3.0, abs=1e-6)

    def test_strong_duality_standard_form(self):
        rng = np.random.default_rng(2)
        x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
        sdp = watrous_standard_sdp(x)
        value, _, _, res = sdp.solve(SolveOptions(tol=1e-8))
        assert res.status == "optimal"
        assert abs(res.primal_value - res.dual_value) <= 1e-6 * (1.0 + abs(value))

    def test_max_iters_reports_residuals(self):
        res = solve(psd_boundary_program(), SolveOptions(tol=1e-16, max_iters=60))
        assert res.status == "max_iters"
        assert res.iterations == 60
        assert all(np.isfinite(v) for v in res.residuals.values())

    def test_weak_duality_every_solve(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            prog = nuclear_norm_program(rand_complex(rng, 2, 2))
            res = solve(prog)
            # min form: primal >= dual up to solver tolerance
            assert res.primal_value >= res.dual_value - 1e-6 * (1.0 + abs(res.primal_value))

    def test_determinism(self):
        prog = nuclear_norm_program(np.diag([1.0, -2.0]).astype(complex))
        r1 = solve(prog)
        r2 = solve(prog)
        assert np.array_equal(r1.x, r2.x)
        assert np.array_equal(r1.y, r2.y)
        assert r1.residuals == r2.residuals
        assert r1.iterations == r2.iterations

    def test_objective_scaling_invariance(self):
        rng = np.random.default_rng(4)
        x = rand_complex(rng, 2, 2)
        res1 = solve(nuclear_norm_program(x))
        res10 = solve(nuclear_norm_program(10.0 * x))
        assert res10.primal_value == pytest.approx(10.0 * res1.primal_value, rel=1e-6)


class TestVerifyKkt:
    def test_optimal_pair_passes(self):
        prog = psd_boundary_program()
        res = solve(prog, SolveOptions(tol=1e-10))
        rep = verify_kkt(prog, res.x, res.y)
        assert rep.within(1e-8)

    def test_perturbed_dual_reports_slackness(self):
        prog = psd_boundary_program()
        res = solve(prog, SolveOptions(tol=1e-10))
        bad_y = res.y + 0.05
        rep = verify_kkt(prog, res.x, bad_y)
        assert rep.max_residual() > 1e-3

    def test_dimension_check(self):
        prog = psd_boundary_program()
        with pytest.raises(ShapeError):
            verify_kkt(prog, np.zeros(2), np.zeros(prog.row_dim))


class TestStandardSdp:
    def test_trace_constraint_value(self):
        # maximize Tr(Z) subject to Tr(Z) = 1: optimum 1
        sdp = build_standard_sdp(
            np.eye(2, dtype=complex),
            np.array([[1.0]], dtype=complex),
            lambda z: np.array([[np.trace(z)]]),
        )
        value, z_mat, y_mat, res = sdp.solve()
        assert res.status == "optimal"
        assert value == pytest.approx(1.0, abs=1e-7)
        assert np.trace(z_mat).real == pytest.approx(1.0, abs=1e-7)

    def test_adjoint_identity_random_pairs(self):
        rng = np.random.default_rng(5)
        x = BipartiteOperator(rand_complex(rng, 4, 4), 2, 2)
        sdp = watrous_standard_sdp(x)
        for _ in range(50):
            z = rand_hermitian(rng, sdp.dim_z)
            y = rand_hermitian(rng, sdp.dim_y)
            lhs = np.trace(sdp.xi(z) @ y).real
            rhs = np.trace(z @ sdp.xi_adjoint(y)).real
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_rejects_non_hermiticity_preserving_map(self):
        with pytest.raises(ShapeError):
            build_standard_sdp(
                np.eye(2, dtype=complex),
                np.zeros((2, 2), dtype=complex),
                lambda z: z @ np.array([[0.0, 1.0], [0.0, 0.0]]),
            )

    def test_hvec_round_trip(self):
        rng = np.random.default_rng(6)
        h = rand_hermitian(rng, 3)
        assert np.allclose(hmat(hvec(h), 3), h)
        h2 = rand_hermitian(rng, 3)
        assert hvec(h) @ hvec(h2) == pytest.approx(np.trace(h @ h2).real)


class TestConeSegments:
    def test_psd_size_validation(self):
        with pytest.raises(ShapeError):
            ConeSeg("psd", 5, side=2)

    def test_triplet_dump(self, tmp_path):
        prog = psd_boundary_program()
        path = tmp_path / "prog.txt"
        prog.dump_triplets(path)
        text = path.read_text()
        assert text.startswith("# conic program")
        assert "psd:10(side=4)" in text
