import numpy as np
import pytest

from mapla.errors import DimensionMismatch, NotInterior
from mapla.potentials import (
    BlrData,
    DirichletParams,
    blr_potential,
    dirichlet_potential,
    lifted_linear_potential,
    linear_potential,
    load_blr_csv,
    quadratic_potential,
    uniform_potential,
)


def fd_grad(f, x, h=1e-6):
    d = len(x)
    g = np.zeros(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


class TestDirichlet:
    def test_hand_value_d1(self):
        pot = dirichlet_potential(np.array([1.0, 1.0]))
        x = np.array([0.5])
        assert np.isclose(pot.value(x), 2 * np.log(2))
        assert np.isclose(pot.grad(x)[0], 0.0, atol=1e-14)

    def test_zero_parameters_give_uniform(self):
        pot = dirichlet_potential(np.zeros(3))
        x = np.array([0.2, 0.3])
        assert pot.value(x) == 0.0
        assert np.all(pot.grad(x) == 0.0)

    def test_metadata(self):
        a = np.array([1.0, 2.0, 3.0])
        pot = dirichlet_potential(a)
        assert pot.metadata.mu == 1.0
        assert pot.metadata.lam == 3.0
        assert np.isclose(pot.metadata.beta, np.linalg.norm(a))
        assert pot.metadata.metric_kind == "simplex-logbarrier"

    def test_not_interior(self):
        pot = dirichlet_potential(np.array([1.0, 1.0]))
        with pytest.raises(NotInterior):
            pot.value(np.array([1.5]))
        with pytest.raises(NotInterior):
            pot.grad(np.array([-0.1]))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            DirichletParams(np.array([0.5, -1.5]))
        assert DirichletParams(np.array([0.0, 0.5])).log_concave
        assert not DirichletParams(np.array([-0.5, 0.5])).log_concave

    def test_convexity_when_log_concave(self):
        # v' hess f v >= 0, Hessian by finite differences of grad.
        pot = dirichlet_potential(np.array([0.5, 1.0, 2.0]))
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.dirichlet([2.0, 2.0, 2.0])[:2] * 0.9 + 0.03
            v = rng.standard_normal(2)
            h = 1e-6
            Hv = (pot.grad(x + h * v) - pot.grad(x - h * v)) / (2 * h)
            assert v @ Hv >= -1e-6 * (1 + np.abs(Hv).max())


class TestLinear:
    def test_zero_sigma_is_uniform(self):
        pot = linear_potential(np.zeros(2))
        assert pot.value(np.array([3.0, -4.0])) == 0.0

    def test_arithmetic(self):
        pot = linear_potential(np.array([1.0, -1.0]))
        assert np.isclose(pot.value(np.array([0.3, 0.4])), -0.1)

    def test_zero_hessian(self):
        pot = linear_potential(np.array([1.0, -1.0]))
        assert np.all(pot.hess(np.zeros(2)) == 0.0)

    def test_uniform_helper(self):
        pot = uniform_potential(3)
        assert pot.kind == "uniform"
        assert pot.value(np.ones(3)) == 0.0


class TestBlr:
    def test_hand_value_single_datum(self):
        data = BlrData(X=np.array([[1.0, 0.0]]), y=np.array([1.0]))
        pot = blr_potential(data)
        theta = np.zeros(2)
        assert np.isclose(pot.value(theta), np.log(2))
        assert np.allclose(pot.grad(theta), [-0.5, 0.0])

    def test_large_margin_stability(self):
        # log(1 + e^50) - 50 = log(1 + e^-50) ~ e^-50 ~ 2e-22, i.e. zero to
        # double precision at this magnitude; no overflow allowed.
        data = BlrData(X=np.array([[1.0]]), y=np.array([1.0]))
        pot = blr_potential(data)
        val = pot.value(np.array([50.0]))
        assert np.isfinite(val)
        assert abs(val - np.exp(-50.0)) < 1e-12

    def test_translation_consistency_small_margins(self):
        rng = np.random.default_rng(5)
        data = BlrData(X=rng.standard_normal((20, 3)) * 0.01,
                       y=(rng.random(20) < 0.5).astype(float))
        pot = blr_potential(data)
        theta = rng.standard_normal(3) * 0.01
        m = data.X @ theta
        naive = float(np.sum(np.log(1.0 + np.exp(m))) - data.y @ m)
        stable = pot.value(theta) - pot.value(np.zeros(3)) + 20 * np.log(2.0)
        assert abs(stable - naive) <= 1e-9

    def test_data_validation(self):
        with pytest.raises(ValueError):
            BlrData(X=np.ones((2, 2)), y=np.array([0.0, 2.0]))
        with pytest.raises(DimensionMismatch):
            BlrData(X=np.ones((2, 2)), y=np.array([0.0]))

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("f1,f2,label\n0.5,-1.0,1\n-0.25,2.0,0\n")
        data = load_blr_csv(path)
        assert data.n == 2 and data.dim == 2
        assert np.allclose(data.X, [[0.5, -1.0], [-0.25, 2.0]])
        assert np.array_equal(data.y, [1.0, 0.0])


class TestQuadratic:
    def test_zero_scale_is_uniform(self):
        pot = quadratic_potential(np.zeros(2), np.eye(2), 0.0)
        assert pot.value(np.array([5.0, 5.0])) == 0.0

    def test_hand_value(self):
        pot = quadratic_potential(np.zeros(1), np.eye(1), 0.5)
        assert pot.value(np.array([2.0])) == 2.0
        assert pot.grad(np.array([2.0]))[0] == 2.0

    def test_lifted_linear(self):
        pot = lifted_linear_potential(2)
        assert pot.dim == 3
        assert pot.value(np.array([9.0, 9.0, 1.5])) == 1.5
        assert np.array_equal(pot.grad(np.zeros(3)), [0.0, 0.0, 1.0])


GRAD_CASES = [
    ("dirichlet", dirichlet_potential(np.array([1.0, 2.0, 0.5])),
     lambda rng: rng.dirichlet([3.0, 3.0, 3.0])[:2] * 0.8 + 0.05),
    ("linear", linear_potential(np.array([1.0, -2.0])),
     lambda rng: rng.standard_normal(2)),
    ("quadratic", quadratic_potential(np.array([0.5, -0.5]),
                                      np.array([[2.0, 0.3], [0.3, 1.0]]), 0.7),
     lambda rng: rng.standard_normal(2)),
    ("blr", blr_potential(BlrData(X=np.random.default_rng(1).standard_normal((30, 2)),
                                  y=(np.random.default_rng(2).random(30) < 0.5).astype(float))),
     lambda rng: rng.standard_normal(2)),
]


@pytest.mark.parametrize("name,pot,draw", GRAD_CASES, ids=[c[0] for c in GRAD_CASES])
def test_grad_matches_finite_differences(name, pot, draw):
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = draw(rng)
        g = pot.grad(x)
        g_fd = fd_grad(pot.value, x)
        denom = max(np.abs(g).max(), 1.0)
        assert np.abs(g - g_fd).max() <= 1e-6 * denom


@pytest.mark.parametrize("name,pot,draw", GRAD_CASES, ids=[c[0] for c in GRAD_CASES])
def test_hess_matches_finite_differences_of_grad(name, pot, draw):
    rng = np.random.default_rng(8)
    for _ in range(10):
        x = draw(rng)
        H = pot.hess(x)
        h = 1e-6
        for j in range(len(x)):
            e = np.zeros(len(x))
            e[j] = h
            col = (pot.grad(x + e) - pot.grad(x - e)) / (2 * h)
            denom = max(np.abs(H).max(), 1.0)
            assert np.abs(H[:, j] - col).max() <= 5e-5 * denom
