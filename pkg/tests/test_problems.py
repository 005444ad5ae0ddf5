import math

import numpy as np
import pytest

from dfix import (InvalidParameterError, KrigingField, gaussian_kernel, kriging_predict,
                  make_kriging_system, make_sdd_system)
from dfix.problems import grid_positions, load_system


class TestKernel:
    def test_values(self):
        assert gaussian_kernel(0.0) == 1.0
        assert gaussian_kernel(1.0) == pytest.approx(math.exp(-5), rel=1e-15)
        assert gaussian_kernel(1.0) == pytest.approx(6.7379e-3, abs=1e-7)
        assert gaussian_kernel(0.5) == pytest.approx(math.exp(-1.25), rel=1e-15)
        assert gaussian_kernel(0.5) == pytest.approx(0.2865, abs=1e-4)

    def test_negative(self):
        with pytest.raises(InvalidParameterError):
            gaussian_kernel(-0.1)


class TestKriging:
    def test_single_point(self):
        s = make_kriging_system([[1.0, 2.0]], [1.0, 2.0])
        assert s.A.tolist() == [[1.0]]
        assert s.b.tolist() == [1.0]
        assert s.y_star.tolist() == [1.0]

    def test_two_points(self):
        d = 0.7
        s = make_kriging_system([[0, 0], [d, 0]], [3, 3])
        k = math.exp(-5 * d * d)
        np.testing.assert_allclose(s.A, [[1, k], [k, 1]], rtol=1e-15)

    def test_grid_spd(self, rng):
        s = make_kriging_system(grid_positions(10, 3.0), rng.uniform(-3, 3, 2))
        assert s.A.shape == (100, 100)
        assert np.array_equal(s.A, s.A.T)
        assert np.all(np.diag(s.A) == 1.0)
        assert np.linalg.eigvalsh(s.A).min() > 0
        np.linalg.cholesky(s.A)
        assert s.residual_inf(s.y_star) <= 1e-10

    def test_random_placements_spd(self, rng):
        for _ in range(5):
            s = make_kriging_system(rng.uniform(-30, 30, (100, 2)), rng.uniform(-30, 30, 2))
            np.linalg.cholesky(s.A)
            assert s.residual_inf(s.y_star) <= 1e-10

    def test_duplicate_positions(self):
        with pytest.raises(InvalidParameterError):
            make_kriging_system([[0, 0], [0, 0]], [1, 1])


class TestPredict:
    def field(self, samples, mean=None):
        pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        kw = {} if mean is None else {"mean": mean}
        return KrigingField(pos, np.asarray(samples, dtype=float), **kw)

    def test_samples_at_mean(self):
        mean = lambda s: 1.0 + s[0] - 2 * s[1]
        fld = self.field([mean(p) for p in [[0, 0], [1, 0], [0, 1]]], mean)
        assert kriging_predict([0.3, -2.0, 5.0], fld, [0.5, 0.5]) == pytest.approx(mean([0.5, 0.5]))

    def test_zero_weights(self):
        fld = self.field([4.0, -1.0, 2.0], lambda s: 3.0)
        assert kriging_predict(np.zeros(3), fld, [2.0, 2.0]) == 3.0

    def test_single_point(self):
        fld = KrigingField(np.array([[0.0, 0.0]]), np.array([2.0]))
        assert kriging_predict([1.0], fld, [5.0, 5.0]) == 2.0

    def test_length_mismatch(self):
        with pytest.raises(InvalidParameterError):
            kriging_predict([1.0, 2.0], self.field([1, 2, 3]), [0, 0])

    def test_interpolates_at_sensor(self):
        pos = grid_positions(4, 1.0)
        z = np.sin(pos[:, 0]) + pos[:, 1]
        s = make_kriging_system(pos, pos[5])
        assert kriging_predict(s.y_star, KrigingField(pos, z), pos[5]) == pytest.approx(z[5], abs=1e-12)


class TestSdd:
    def test_dominance(self):
        for seed in range(5):
            s = make_sdd_system(100, np.random.default_rng(seed))
            A = s.A
            assert np.array_equal(A, A.T)
            off = np.abs(A).sum(axis=1) - np.abs(np.diag(A))
            assert np.all(np.diag(A) > off)
            assert np.all((s.b > 0) & (s.b < 1))
            assert s.residual_inf(s.y_star) <= 1e-10

    def test_deterministic(self):
        a = make_sdd_system(30, np.random.default_rng(5))
        b = make_sdd_system(30, np.random.default_rng(5))
        assert np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b)

    def test_two_by_two_jacobi_norm(self):
        s = make_sdd_system(2, np.random.default_rng(1))
        c = s.A[0, 1]
        assert 0 < c < 1
        assert np.all(np.diag(s.A) > 1)
        jac = np.abs(s.A[0, 1] / np.diag(s.A))
        assert jac.max() < 1

    def test_small_n(self):
        with pytest.raises(InvalidParameterError):
            make_sdd_system(1, np.random.default_rng(0))


class TestLoad:
    def test_round_trip(self, tmp_path):
        f = tmp_path / "sys.txt"
        f.write_text("2\n2 1\n1 2\n3 3\n")
        s = load_system(f)
        assert s.A.tolist() == [[2, 1], [1, 2]]
        np.testing.assert_allclose(s.y_star, [1, 1], atol=1e-15)

    def test_scientific(self, tmp_path):
        f = tmp_path / "sys.txt"
        f.write_text("1\n2.5e0\n5E-1\n")
        assert load_system(f).b.tolist() == [0.5]

    @pytest.mark.parametrize("text", ["2\n2 1\n1 2\n", "2\n2 1\n1 2\n3\n", "x\n", "1\n1,5\n1\n",
                                      "2\n1 1\n1 1\n1 1\n"])
    def test_malformed(self, tmp_path, text):
        f = tmp_path / "sys.txt"
        f.write_text(text)
        with pytest.raises(InvalidParameterError):
            load_system(f)
