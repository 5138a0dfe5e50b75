import mpmath
import numpy as np
import pytest
import scipy.linalg

from splitlab.linear import (
    NILPOTENT_PAIR,
    STIFF_CHI,
    STIFF_T,
    LinearSequence,
    LinearSystem,
    commutator_local_error,
    exact_solution,
    expm,
    expm_apply,
    global_error,
    observed_order,
    random_pair,
    split_solve_linear,
    stiff_scaling,
    stiff_system,
)

DTS = [2.0**-k for k in range(5, 11)]


def errors(sys, seq, dts=DTS, t_end=1.0):
    return [global_error(sys, t_end, int(round(t_end / h)), seq) for h in dts]


class TestExpm:
    def test_zero(self):
        v = np.array([0.3, -1.2, 2.0])
        np.testing.assert_array_equal(expm_apply(np.zeros((3, 3)), 5.0, v), v)

    def test_diagonal(self):
        lam = np.array([-3.0, 0.5, 2.0])
        v = np.array([1.0, 2.0, -1.0])
        np.testing.assert_allclose(expm_apply(np.diag(lam), 0.7, v), np.exp(lam * 0.7) * v, rtol=1e-13)

    def test_nilpotent(self):
        out = expm_apply(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0, np.array([0.0, 1.0]))
        np.testing.assert_allclose(out, [1.0, 1.0], atol=1e-15)

    def test_rotation(self):
        th = 2.5
        r = expm(np.array([[0.0, -th], [th, 0.0]]))
        np.testing.assert_allclose(r, [[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]], atol=1e-14)

    @pytest.mark.parametrize("norm", [0.01, 1.0, 10.0])
    def test_against_scipy(self, rng, norm):
        for _ in range(10):
            m = rng.normal(size=(4, 4))
            m *= norm / np.linalg.norm(m, 2)
            ref = scipy.linalg.expm(m)
            assert np.linalg.norm(expm(m) - ref) <= 1e-12 * np.linalg.norm(ref)

    @pytest.mark.parametrize("norm", [30.0, 100.0])
    def test_against_high_precision(self, norm):
        # scipy drifts to ~1e-12 here on non-normal matrices, so use a 60-digit oracle
        mpmath.mp.dps = 60
        rng = np.random.default_rng(int(norm))
        for _ in range(5):
            m = rng.normal(size=(4, 4))
            m *= norm / np.linalg.norm(m, 2)
            ref = np.array(mpmath.expm(mpmath.matrix(m.tolist())).tolist(), dtype=float)
            assert np.linalg.norm(expm(m) - ref) <= 1e-13 * np.linalg.norm(ref)

    def test_large_diagonal(self, rng):
        lam = rng.uniform(-1000.0, 700.0, 5)
        np.testing.assert_allclose(np.diag(expm(np.diag(lam))), np.exp(lam), rtol=1e-12)

    def test_large_skew(self, rng):
        a = rng.normal(size=(4, 4))
        a = a - a.T
        a *= 1000.0 / np.linalg.norm(a, 2)
        # i*a is Hermitian, so an eigen-decomposition gives an independent oracle
        w, v = np.linalg.eigh(1j * a)
        ref = (v @ np.diag(np.exp(-1j * w)) @ v.conj().T).real
        assert np.linalg.norm(expm(a) - ref) <= 1e-12 * np.linalg.norm(ref)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            expm(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            expm_apply(np.zeros((2, 2)), 1.0, np.zeros(3))


class TestSystem:
    def test_dimension_bounds(self):
        with pytest.raises(ValueError):
            LinearSystem(np.zeros((1, 1)), np.zeros((1, 1)), np.zeros(1))
        with pytest.raises(ValueError):
            LinearSystem(np.zeros((17, 17)), np.zeros((17, 17)), np.zeros(17))

    def test_mismatch(self):
        with pytest.raises(ValueError):
            LinearSystem(np.zeros((2, 2)), np.zeros((3, 3)), np.zeros(2))

    def test_nilpotent_commutator(self):
        np.testing.assert_array_equal(NILPOTENT_PAIR.commutator, [[1.0, 0.0], [0.0, -1.0]])

    def test_bad_step(self):
        with pytest.raises(ValueError):
            split_solve_linear(NILPOTENT_PAIR, 0.0, 3, "AB")


class TestSplitSolve:
    def test_commuting_diagonal(self):
        sys = LinearSystem(np.diag([-1.0, 0.5, 2.0]), np.diag([0.3, -2.0, 0.1]), np.array([1.0, -1.0, 0.5]))
        exact = expm_apply(sys.a + sys.b, 0.1 * 20, sys.v0)
        for seq in LinearSequence:
            np.testing.assert_allclose(split_solve_linear(sys, 0.1, 20, seq), exact, rtol=0, atol=1e-12)

    def test_b_zero(self, rng):
        a = rng.normal(size=(3, 3))
        sys = LinearSystem(a, np.zeros((3, 3)), rng.normal(size=3))
        for dt in (0.5, 0.01):
            for seq in LinearSequence:
                np.testing.assert_allclose(split_solve_linear(sys, dt, 4, seq), exact_solution(sys, 4 * dt), atol=1e-12)

    def test_nilpotent_one_step(self):
        dt = 1e-3
        diff = exact_solution(NILPOTENT_PAIR, dt) - split_solve_linear(NILPOTENT_PAIR, dt, 1, "AB")
        leading = np.linalg.norm(0.5 * NILPOTENT_PAIR.commutator @ NILPOTENT_PAIR.v0) * dt**2
        assert np.linalg.norm(diff) == pytest.approx(leading, rel=5e-3)

    def test_sequence_names(self):
        assert [str(s) for s in LinearSequence] == ["AB", "BA", "StrangAvg"]


class TestCommutatorLaw:
    def test_commuting_pair(self):
        sys = LinearSystem(np.diag([1.0, 2.0]), np.diag([-3.0, 0.5]), np.array([1.0, 1.0]))
        measured, predicted = commutator_local_error(sys, 0.1)
        assert np.all(predicted == 0)
        assert np.linalg.norm(measured) <= 1e-12

    @pytest.mark.parametrize("dt", [1e-2, 1e-3, 1e-4])
    def test_nilpotent_ratio(self, dt):
        measured, predicted = commutator_local_error(NILPOTENT_PAIR, dt)
        ratio = np.linalg.norm(measured) / np.linalg.norm(predicted)
        # third-order remainder: the gap shrinks linearly with dt
        assert abs(ratio - 1.0) <= 2.0 * dt

    def test_relative_gap_vanishes(self, rng):
        sys = random_pair(rng)
        gaps = []
        for dt in (1e-2, 1e-3, 1e-4):
            m, p = commutator_local_error(sys, dt)
            gaps.append(np.linalg.norm(m - p) / np.linalg.norm(p))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-3

    def test_stiff_prediction_scales_inverse_eps(self):
        preds = [np.linalg.norm(commutator_local_error(stiff_system(STIFF_CHI, STIFF_T, np.array([1.0, 0.0]), e), 1e-6)[1])
                 for e in (1e-1, 1e-2, 1e-3)]
        np.testing.assert_allclose(np.array(preds) * [1e-1, 1e-2, 1e-3], preds[0] * 1e-1, rtol=1e-12)


class TestOrders:
    def test_exact_first_order_data(self):
        assert observed_order(DTS, [4.2 * h for h in DTS]) == pytest.approx(1.0, abs=1e-9)

    def test_two_points(self):
        assert observed_order([0.1, 0.05], [0.04, 0.01]) == pytest.approx(2.0)

    def test_needs_nonzero(self):
        with pytest.raises(ValueError):
            observed_order([0.1, 0.05], [0.0, 0.0])

    def test_nilpotent_godunov(self):
        assert observed_order(DTS, errors(NILPOTENT_PAIR, "AB")) == pytest.approx(1.0, abs=0.1)

    def test_nilpotent_strang(self):
        assert observed_order(DTS, errors(NILPOTENT_PAIR, "StrangAvg")) == pytest.approx(2.0, abs=0.1)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_pairs(self, seed):
        sys = random_pair(np.random.default_rng(seed))
        assert observed_order(DTS, errors(sys, "AB")) == pytest.approx(1.0, abs=0.1)
        assert observed_order(DTS, errors(sys, "BA")) == pytest.approx(1.0, abs=0.1)
        assert observed_order(DTS, errors(sys, "StrangAvg")) == pytest.approx(2.0, abs=0.1)


class TestInvariants:
    def test_commuting_pairs_exact(self, rng):
        for _ in range(50):
            sys = random_pair(rng, commuting=True)
            np.testing.assert_allclose(sys.a @ sys.b, sys.b @ sys.a, atol=1e-12)
            exact = exact_solution(sys, 1.0)
            for seq in LinearSequence:
                assert np.linalg.norm(split_solve_linear(sys, 1.0 / 32, 32, seq) - exact) <= 1e-10

    def test_random_pair_norms(self, rng):
        sys = random_pair(rng, n=5, norm=0.5)
        assert np.linalg.norm(sys.a, 2) == pytest.approx(0.5)
        assert np.linalg.norm(sys.b, 2) == pytest.approx(0.5)

    def test_stiff_error_grows_inverse_eps(self):
        eps = np.array([1e-1, 1e-2, 1e-3])
        errs = stiff_scaling(eps)
        normalised = errs * eps / (errs[0] * eps[0])
        assert np.all((normalised >= 0.5) & (normalised <= 2.0))

    def test_stiff_error_saturates_past_fast_scale(self):
        # once the horizon is long against eps the fast mode is damped and the
        # error stops growing like 1/eps
        eps = np.array([1e-1, 1e-2, 1e-3])
        errs = stiff_scaling(eps, dt=1e-2, t_end=1.0)
        assert errs[2] * eps[2] < 0.5 * errs[0] * eps[0]
