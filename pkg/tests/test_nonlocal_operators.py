import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractalcalc.errors import GridError, OrderError, SingularGridError
from fractalcalc.nonlocal_operators import (
    FracOrder,
    Side,
    _differentiate,
    abel_weights,
    caputo_derivative,
    rl_derivative,
    rl_integral,
)
from fractalcalc.special_functions import gamma, rgamma
from fractalcalc.staircase_coords import GridFunction

from conftest import CANTOR_ALPHA

U = 2.0
N = 4097


def grid(f, n=N, u_end=U):
    return GridFunction.from_function(f, 0.0, u_end, n)


def monomial(nu, n=N):
    """u**nu: sampled when nu is an integer, an exact power term otherwise."""
    if float(nu).is_integer():
        return grid(lambda u: u**nu, n)
    return GridFunction(0.0, U / (n - 1), np.zeros(n), ((1.0, nu),))


def power(nu, beta, u):
    """Exact order-beta integral (or derivative for beta < 0) of u**nu."""
    return gamma(nu + 1) * rgamma(nu + beta + 1) * u ** (nu + beta)


def sup(a, b, skip=1):
    return float(np.max(np.abs(a[skip:] - b[skip:])))


class TestFracOrder:
    @pytest.mark.parametrize(
        "alpha, beta, n", [(1.0, 0.5, 1), (1.0, 1.0, 2), (0.5, 0.5, 2), (0.5, 1.2, 3), (CANTOR_ALPHA, 0.6, 1)]
    )
    def test_n(self, alpha, beta, n):
        assert FracOrder(alpha, beta).n == n

    def test_rounding_guard(self):
        alpha = 0.1 + 0.2  # 0.30000000000000004
        assert FracOrder(alpha, 3 * alpha).n == 4

    @pytest.mark.parametrize("alpha, beta", [(0.0, 0.5), (1.0, -0.1), (1.0, math.inf)])
    def test_invalid(self, alpha, beta):
        with pytest.raises(OrderError):
            FracOrder(alpha, beta)


class TestAbelWeights:
    def test_first_values(self):
        beta = 0.5
        c, A = abel_weights(beta, 4)
        p = beta + 1
        assert c[0] == 1.0
        assert c[1] == pytest.approx(2**p - 2, rel=1e-14)
        assert c[2] == pytest.approx(3**p - 2 * 2**p + 1, rel=1e-13)
        assert A[1] == beta
        assert A[2] == pytest.approx(1 - 2**p + p * 2**beta, rel=1e-13)

    @given(st.floats(0.05, 3.0))
    def test_integrates_constants_exactly(self, beta):
        # weights summed at node j reproduce j**beta * Gamma(beta+2)/Gamma(beta+1)
        size = 64
        c, A = abel_weights(beta, size)
        j = np.arange(1, size)
        total = A[1:] + np.cumsum(c)[: size - 1]
        np.testing.assert_allclose(total, (beta + 1) * j**beta, rtol=1e-10)


class TestLeftIntegral:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.5])
    @pytest.mark.parametrize("beta", [0.3, 0.6, 1.4])
    def test_power_rule(self, nu, beta):
        r = rl_integral(monomial(nu), FracOrder(1.0, beta))
        assert sup(r.values(), power(nu, beta, r.nodes), 0) < 1e-6

    def test_sampled_root_converges(self):
        # sampled sqrt(u) is not smooth at 0: slower, but still convergent
        errs = []
        for n in (1025, 4097, 16385):
            r = rl_integral(grid(np.sqrt, n), FracOrder(1.0, 0.3))
            errs.append(sup(r.values(), power(0.5, 0.3, r.nodes), 0))
        assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-4

    def test_exp_half(self):
        # I^(1/2) e^u = e^u erf(sqrt(u))
        r = rl_integral(grid(np.exp), FracOrder(1.0, 0.5))
        exact = np.exp(r.nodes) * np.vectorize(math.erf)(np.sqrt(r.nodes))
        assert sup(r.values(), exact, 0) < 1e-6

    def test_singular_input(self):
        # I^0.5 u^-0.5 = Gamma(1/2) exactly, carried by the power terms
        g = GridFunction(0.0, U / (N - 1), np.zeros(N), ((1.0, -0.5),))
        r = rl_integral(g, FracOrder(1.0, 0.5))
        assert sup(r.values(), np.full(N, math.sqrt(math.pi)), 0) < 1e-12

    def test_non_integrable(self):
        g = GridFunction(0.0, 0.1, np.zeros(5), ((1.0, -1.0),))
        with pytest.raises(SingularGridError):
            rl_integral(g, FracOrder(1.0, 0.5))

    def test_zero_order(self):
        with pytest.raises(OrderError):
            rl_integral(grid(np.exp), FracOrder(1.0, 0.0))


class TestRightSide:
    @pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
    def test_integral_power_rule(self, nu):
        g = grid(lambda u: (U - u) ** nu)
        r = rl_integral(g, FracOrder(1.0, 0.4), Side.RIGHT)
        assert sup(r.values(), power(nu, 0.4, U - r.nodes), 0) < 1e-6

    def test_derivative_power_rule(self):
        g = grid(lambda u: (U - u) ** 2)
        r = rl_derivative(g, FracOrder(1.0, 0.4), Side.RIGHT)
        assert sup(r.values(), power(2.0, -0.4, U - r.nodes), 0) < 1e-4

    def test_caputo_kills_constants(self):
        r = caputo_derivative(grid(lambda u: np.full_like(u, 3.0)), FracOrder(1.0, 0.5), Side.RIGHT)
        assert np.max(np.abs(r.values())) < 1e-12

    def test_rejects_power_terms(self):
        g = GridFunction(0.0, 0.1, np.zeros(8), ((1.0, 0.5),))
        with pytest.raises(GridError):
            rl_integral(g, FracOrder(1.0, 0.5), Side.RIGHT)

    @given(st.floats(0.1, 0.9))
    def test_mirror(self, beta):
        f = lambda u: np.sin(3 * u) + u  # noqa: E731
        left = rl_integral(grid(f, 513), FracOrder(1.0, beta))
        right = rl_integral(grid(lambda u: f(U - u), 513), FracOrder(1.0, beta), Side.RIGHT)
        np.testing.assert_allclose(right.values(), left.values()[::-1], atol=1e-12)


class TestDerivatives:
    @pytest.mark.parametrize("nu", [0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("beta", [0.3, 0.6, 1.5])
    def test_rl_power_rule(self, nu, beta):
        r = rl_derivative(monomial(nu), FracOrder(1.0, beta))
        keep = r.nodes >= 0.05
        err = np.max(np.abs(r.values()[keep] - power(nu, -beta, r.nodes[keep])))
        assert err < 1e-3

    def test_constant_is_singular_term(self):
        r = rl_derivative(grid(lambda u: np.full_like(u, 2.0)), FracOrder(1.0, 0.5))
        assert len(r.powers) == 1
        assert r.powers[0] == pytest.approx((2.0 / math.sqrt(math.pi), -0.5))
        assert np.max(np.abs(r.samples)) < 1e-12

    def test_integer_order_is_classical(self):
        # n = 3 here: three derivatives of a second integral, accurate up to both ends
        r = rl_derivative(grid(np.sin), FracOrder(0.5, 1.0))
        assert sup(r.values(), np.cos(r.nodes), 0) < 1e-5

    @pytest.mark.parametrize("times", [1, 2, 3])
    def test_difference_stencils_second_order(self, times):
        errs = []
        for n in (129, 257):
            u = np.linspace(0, 2, n)
            errs.append(np.max(np.abs(_differentiate(np.sin(u), u[1], times) - np.sin(u + times * np.pi / 2))))
        assert 3.5 < errs[0] / errs[1] < 4.5

    def test_zero_order_is_identity(self):
        g = grid(np.sin)
        assert rl_derivative(g, FracOrder(1.0, 0.0)) is g
        assert caputo_derivative(g, FracOrder(1.0, 0.0)) is g

    @pytest.mark.parametrize("beta", [0.3, 0.7])
    def test_caputo_vs_rl(self, beta):
        # D^b g = C^b g + g(0) u^-b / Gamma(1-b) for 0 < b < 1
        g = grid(lambda u: np.cos(u) + 1)
        order = FracOrder(1.0, beta)
        rl = rl_derivative(g, order)
        cap = caputo_derivative(g, order)
        u = g.nodes[1:]
        np.testing.assert_allclose(
            rl.values()[1:], cap.values()[1:] + 2 * u**-beta / gamma(1 - beta), atol=1e-4
        )

    def test_caputo_power_rule(self):
        r = caputo_derivative(grid(lambda u: u**2), FracOrder(1.0, 0.5))
        assert sup(r.values(), power(2.0, -0.5, r.nodes), 0) < 1e-5

    def test_short_grid(self):
        with pytest.raises(GridError):
            rl_derivative(grid(np.sin, 3), FracOrder(1.0, 0.5))
        with pytest.raises(GridError):
            caputo_derivative(grid(np.sin, 2), FracOrder(1.0, 0.5))

    def test_caputo_rejects_power_terms(self):
        g = GridFunction(0.0, 0.1, np.zeros(8), ((1.0, 0.5),))
        with pytest.raises(GridError):
            caputo_derivative(g, FracOrder(1.0, 0.5))


@given(st.floats(0.1, 1.2), st.floats(0.1, 1.2))
def test_semigroup(a, b):
    g = grid(lambda u: np.exp(-u) + u**2, 1025)
    two = rl_integral(rl_integral(g, FracOrder(1.0, a)), FracOrder(1.0, b))
    one = rl_integral(g, FracOrder(1.0, a + b))
    assert sup(two.values(), one.values(), 0) < 1e-5


@given(st.floats(0.1, 0.9))
def test_derivative_inverts_integral(beta):
    g = grid(lambda u: np.cos(2 * u) + u, 2049)
    order = FracOrder(1.0, beta)
    back = rl_derivative(rl_integral(g, order), order)
    assert sup(back.values(), g.samples, 2) < 1e-4


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 1.5))
def test_linearity(a, b, beta):
    f = grid(np.sin, 257)
    g = grid(lambda u: u**2, 257)
    order = FracOrder(CANTOR_ALPHA, beta)
    lhs = rl_integral(a * f + b * g, order).values()
    rhs = a * rl_integral(f, order).values() + b * rl_integral(g, order).values()
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)
