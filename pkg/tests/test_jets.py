import math

import numpy as np
import pytest

from oscstab.errors import DimensionMismatch, EvaluationError
from oscstab.jets import (
    Jet2,
    SmoothVectorField,
    cbrt,
    constant_field,
    directional_derivative,
    jet_cbrt,
    jet_cos,
    jet_d1,
    jet_d2,
    jet_sec,
    jet_sin,
    jet_sqrt,
    jet_tan,
    seed_point,
    sec,
    variable,
)

from oracles import (
    assert_close_rel,
    fd_directional,
    fd_step,
    random_point,
    random_polynomial_field,
)


def jet_tuple(j):
    return (j.value, j.d1, j.d2)


def test_constant_lifting_and_ring_ops():
    a = Jet2(2.0, 3.0, 4.0)
    assert jet_tuple(a + 1.0) == (3.0, 3.0, 4.0)
    assert jet_tuple(1.0 + a) == (3.0, 3.0, 4.0)
    assert jet_tuple(2.0 * a) == (4.0, 6.0, 8.0)
    assert jet_tuple(a - a) == (0.0, 0.0, 0.0)
    assert jet_tuple(-a) == (-2.0, -3.0, -4.0)


def test_product_rule():
    # (f*g)'' = f''g + 2f'g' + fg''
    f = Jet2(2.0, 3.0, 4.0)
    g = Jet2(5.0, 7.0, 11.0)
    p = f * g
    assert p.value == 10.0
    assert p.d1 == 2.0 * 7.0 + 3.0 * 5.0
    assert p.d2 == 2.0 * 11.0 + 2.0 * 3.0 * 7.0 + 4.0 * 5.0


def test_division_matches_finite_differences():
    f = Jet2(2.0, 3.0, 4.0)
    g = Jet2(5.0, 7.0, 11.0)
    q = f / g

    def path(s):
        return (2.0 + 3.0 * s + 2.0 * s * s) / (5.0 + 7.0 * s + 5.5 * s * s)

    h = 1e-5
    d1 = (path(h) - path(-h)) / (2 * h)
    d2 = (path(h) - 2 * path(0.0) + path(-h)) / (h * h)
    assert q.value == pytest.approx(path(0.0), abs=1e-14)
    assert q.d1 == pytest.approx(d1, abs=1e-8)
    assert q.d2 == pytest.approx(d2, abs=1e-5)


def test_jet_cos_at_origin():
    assert jet_tuple(jet_cos(Jet2(0.0, 1.0, 0.0))) == (1.0, 0.0, -1.0)


def test_jet_cbrt_of_negative_constant():
    assert jet_tuple(jet_cbrt(Jet2(-8.0, 0.0, 0.0))) == (-2.0, 0.0, 0.0)


def test_jet_sin_chain_rule_pinned():
    # sin(pi/2 + 2s): value 1, d1 = 2 cos(pi/2) = 0, d2 = -4 sin(pi/2) = -4
    j = jet_sin(Jet2(math.pi / 2.0, 2.0, 0.0))
    assert j.value == pytest.approx(1.0, abs=1e-15)
    assert j.d1 == pytest.approx(0.0, abs=1e-15)
    assert j.d2 == pytest.approx(-4.0, abs=1e-12)
    # cross-check by central differences of sin(pi/2 + 2s) at s = 0
    h = 1e-5
    path = lambda s: math.sin(math.pi / 2.0 + 2.0 * s)
    assert j.d1 == pytest.approx((path(h) - path(-h)) / (2 * h), abs=1e-9)
    assert j.d2 == pytest.approx((path(h) - 2 * path(0) + path(-h)) / (h * h), abs=1e-5)


@pytest.mark.parametrize(
    "jfun,ref",
    [
        (jet_sin, math.sin),
        (jet_cos, math.cos),
        (jet_sqrt, math.sqrt),
        (jet_cbrt, lambda v: math.copysign(abs(v) ** (1 / 3), v)),
        (jet_tan, math.tan),
        (jet_sec, lambda v: 1.0 / math.cos(v)),
    ],
)
def test_unary_chain_rule_against_finite_differences(jfun, ref):
    a = Jet2(0.7, 1.3, -0.4)
    j = jfun(a)
    path = lambda s: ref(0.7 + 1.3 * s - 0.2 * s * s)
    h = 1e-5
    assert j.value == pytest.approx(path(0.0), rel=1e-12)
    assert j.d1 == pytest.approx((path(h) - path(-h)) / (2 * h), rel=1e-7)
    assert j.d2 == pytest.approx((path(h) - 2 * path(0) + path(-h)) / (h * h), rel=1e-4)


def test_domain_errors_carry_offending_value():
    with pytest.raises(EvaluationError) as err:
        jet_sqrt(Jet2(-1.0, 1.0, 0.0))
    assert err.value.value == -1.0
    with pytest.raises(EvaluationError):
        jet_tan(Jet2(math.pi / 2.0, 1.0, 0.0))
    with pytest.raises(EvaluationError):
        sec(math.pi / 2.0)
    with pytest.raises(EvaluationError):
        jet_cbrt(Jet2(0.0, 1.0, 0.0))


def test_cbrt_of_exact_zero_constant():
    assert jet_tuple(jet_cbrt(Jet2(0.0, 0.0, 0.0))) == (0.0, 0.0, 0.0)
    assert cbrt(0.0) == 0.0
    assert cbrt(-27.0) == pytest.approx(-3.0, rel=1e-15)


def test_directional_derivative_of_constant_field_is_zero():
    f = constant_field(3, [1.0, -2.0, 0.5])
    g = random_polynomial_field(np.random.default_rng(0), 3)
    assert directional_derivative(f, g, [0.3, -0.1, 0.9]) == [0.0, 0.0, 0.0]


def test_directional_derivative_pinned_linear_case():
    # f = (x2, 0), g = (0, 1): Df = [[0,1],[0,0]], Df.g = (1, 0)
    f = SmoothVectorField(2, lambda x: [x[1], 0.0])
    g = constant_field(2, [0.0, 1.0])
    got = directional_derivative(f, g, [0.0, 0.0])
    assert got == [1.0, 0.0]
    oracle = fd_directional(f.eval, [0.0, 0.0], g.eval([0.0, 0.0]), 1e-5)
    assert_close_rel(got, oracle, 1e-9)


def test_directional_derivative_along_itself_identity():
    f = SmoothVectorField(2, lambda x: [x[0], x[1]])
    got = directional_derivative(f, f, [2.0, 3.0])
    assert got == [2.0, 3.0]


def test_dimension_mismatch_raises():
    f = constant_field(2, [1.0, 0.0])
    g = constant_field(3, [1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        directional_derivative(f, g, [0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        f.eval([0.0, 0.0, 0.0])


def test_field_output_arity_checked():
    bad = SmoothVectorField(2, lambda x: [x[0]])
    with pytest.raises(DimensionMismatch):
        bad.eval([1.0, 2.0])


def test_random_polynomial_fields_match_fd_oracle():
    rng = np.random.default_rng(1234)
    for _ in range(20):
        dim = int(rng.integers(2, 7))
        f = random_polynomial_field(rng, dim)
        g = random_polynomial_field(rng, dim)
        x = random_point(rng, dim)
        got = directional_derivative(f, g, x)
        oracle = fd_directional(f.eval, x, g.eval(x), fd_step(x))
        assert_close_rel(got, oracle, 1e-6)


def test_linearity_in_direction():
    rng = np.random.default_rng(77)
    for _ in range(5):
        dim = int(rng.integers(2, 7))
        f = random_polynomial_field(rng, dim)
        g1 = random_polynomial_field(rng, dim)
        g2 = random_polynomial_field(rng, dim)
        x = random_point(rng, dim)
        al, be = 0.7, -1.3
        combo = SmoothVectorField(
            dim, lambda p: [al * a + be * b for a, b in zip(g1.eval(p), g2.eval(p))]
        )
        lhs = directional_derivative(f, combo, x)
        d1 = directional_derivative(f, g1, x)
        d2 = directional_derivative(f, g2, x)
        rhs = [al * a + be * b for a, b in zip(d1, d2)]
        assert_close_rel(lhs, rhs, 1e-12)


def test_second_order_seed_matches_numerical_derivative_of_d1():
    # d2 of f(x + s v) should equal d/ds of the d1 read at x + s v.
    rng = np.random.default_rng(9)
    for _ in range(5):
        dim = int(rng.integers(2, 7))
        f = random_polynomial_field(rng, dim)
        x = random_point(rng, dim)
        v = random_point(rng, dim)

        def d1_at(s):
            xs = [xi + s * vi for xi, vi in zip(x, v)]
            return [jet_d1(o) for o in f.eval(seed_point(xs, v))]

        h = 1e-5
        jets = f.eval(seed_point(x, v))
        numeric = [(a - b) / (2 * h) for a, b in zip(d1_at(h), d1_at(-h))]
        assert_close_rel([jet_d2(o) for o in jets], numeric, 1e-5)


def test_nested_jets_give_exact_mixed_derivatives():
    # f(u, v) = sin(u) * v^2 at u = 0.5 + s, v = 2 + r:
    # d^2/(ds dr) = cos(u) * 2v = cos(0.5) * 4.
    inner_u = Jet2(0.5, 1.0, 0.0)  # s-jet
    inner_v = Jet2(2.0, 0.0, 0.0)
    outer_u = Jet2(inner_u, inner_u * 0.0, inner_u * 0.0)  # r-seed 0
    outer_v = Jet2(inner_v, inner_v * 0.0 + 1.0, inner_v * 0.0)  # r-seed 1
    out = jet_sin(outer_u) * outer_v * outer_v
    mixed = out.d1.d1  # d/dr then d/ds
    assert mixed == pytest.approx(math.cos(0.5) * 4.0, rel=1e-12)


def test_variable_helper():
    v = variable(3.0)
    assert jet_tuple(v) == (3.0, 1.0, 0.0)


def test_plain_evaluation_agrees_with_zero_seed_jets():
    rng = np.random.default_rng(55)
    for _ in range(5):
        dim = int(rng.integers(2, 7))
        f = random_polynomial_field(rng, dim)
        x = random_point(rng, dim)
        plain = f.eval(x)
        jetted = f.eval([Jet2(xi, 0.0, 0.0) for xi in x])
        values = [o.value if isinstance(o, Jet2) else o for o in jetted]
        assert values == pytest.approx(plain, rel=1e-15)
        assert all(jet_d1(o) == 0.0 and jet_d2(o) == 0.0 for o in jetted)
