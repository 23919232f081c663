import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangraeffe.oracle import aberth_roots, match_rootsets
from tangraeffe.poly import (
    DegenerateThetaError,
    PolyFormatError,
    Polynomial,
    backward_error,
    chebyshev_roots,
    deflate_zero_roots,
    derivative,
    eval_poly,
    format_poly,
    gen_chebyshev,
    gen_kostlan,
    gen_perfidious,
    mobius_pullback,
    mobius_transform,
    parse_poly,
    read_poly,
    write_poly,
)


def test_polynomial_trims_and_validates():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert p.is_real
    with pytest.raises(ValueError, match="zero polynomial"):
        Polynomial([0, 0])
    with pytest.raises(ValueError):
        Polynomial([1j, 1], is_real=True)
    assert not Polynomial([1, 2], is_real=False).is_real


def test_eval_examples():
    assert eval_poly(Polynomial([-1, 0, 1]), 2) == 3
    p = Polynomial([3.5, -2, 7])
    assert eval_poly(p, 0) == 3.5
    q = gen_perfidious(4)
    assert abs(eval_poly(q, 1)) <= 1e-12
    xs = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(eval_poly(Polynomial([-1, 0, 1]), xs), [-1, 0, 3])


def test_derivative_examples():
    assert derivative(Polynomial([1, -2, 1])) == Polynomial([-2, 2])
    assert derivative(Polynomial([0, 0, 0, 0, 1])) == Polynomial([0, 0, 0, 4])
    f = Polynomial([-24.24, 74.5, -85.35, 45.1, -11.01, 1])
    np.testing.assert_allclose(
        derivative(f).coeffs.real, [74.5, -170.7, 135.3, -44.04, 5], rtol=1e-14
    )
    with pytest.raises(ValueError, match="constant polynomial"):
        derivative(Polynomial([5]))


def test_derivative_product_matches_expanded_example():
    f = Polynomial(np.poly([1, 1.01, 2, 3, 4])[::-1])
    np.testing.assert_allclose(f.coeffs.real, [-24.24, 74.5, -85.35, 45.1, -11.01, 1], rtol=1e-12)


@given(
    st.lists(st.integers(-1000, 1000), min_size=2, max_size=8),
    st.lists(st.integers(-1000, 1000), min_size=2, max_size=8),
    st.integers(-4, 4),
    st.integers(-4, 4),
)
def test_derivative_linear_exact(a, b, ea, eb):
    n = max(len(a), len(b))
    a = np.pad(np.array(a, dtype=float), (0, n - len(a)))
    b = np.pad(np.array(b, dtype=float), (0, n - len(b)))
    a[-1] = b[-1] = 1.0
    ca, cb = 2.0**ea, 2.0**eb
    if ca + cb == 0:
        return
    lhs = derivative(Polynomial(ca * a + cb * b)).coeffs
    rhs = ca * derivative(Polynomial(a)).coeffs + cb * derivative(Polynomial(b)).coeffs
    k = min(lhs.size, rhs.size)
    assert np.array_equal(lhs[:k], rhs[:k])


def test_deflate_zero_roots():
    q, k = deflate_zero_roots(Polynomial([0, 0, 1, 1]))
    assert (q, k) == (Polynomial([1, 1]), 2)
    q, k = deflate_zero_roots(Polynomial([1, 0, 1]))
    assert (q, k) == (Polynomial([1, 0, 1]), 0)
    q, k = deflate_zero_roots(Polynomial([0, 0, 0, 0, 0, 3]))
    assert (q, k) == (Polynomial([3]), 5)


def test_mobius_identity_is_bit_exact():
    p = gen_kostlan(12, 3, real=False)
    assert mobius_transform(p, 0.0) == p


def test_mobius_x2_plus_1_quarter_turn():
    theta = math.pi / 4
    f = mobius_transform(Polynomial([1, 0, 1]), theta)
    back = [mobius_pullback(z, theta) for z in np.roots(f.coeffs[::-1])]
    assert match_rootsets(back, [1j, -1j]) <= 1e-10


def test_mobius_rejects_bad_theta():
    with pytest.raises(ValueError):
        mobius_transform(Polynomial([1, 1]), -math.pi)
    with pytest.raises(ValueError):
        mobius_transform(Polynomial([1, 1]), 4.0)
    with pytest.raises(ValueError):
        mobius_pullback(1.0, float("nan"))


def test_mobius_degenerate_theta():
    # root at x = 1 maps to infinity under the inverse map when tan(theta) = -1
    with pytest.raises(DegenerateThetaError, match="degenerate theta, retry"):
        mobius_transform(Polynomial([-1, 1]), -math.pi / 4)


def test_mobius_real_input_stays_real():
    f = mobius_transform(gen_perfidious(6), 0.7)
    assert f.is_real and np.all(f.coeffs.imag == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10_000), st.floats(-3.1, 3.1), st.booleans())
def test_mobius_roots_pull_back(d, seed, theta, real):
    p = gen_kostlan(d, seed, real=real)
    try:
        f = mobius_transform(p, theta)
    except DegenerateThetaError:
        return
    back = [mobius_pullback(z, theta) for z in aberth_roots(f).roots]
    assert match_rootsets(back, aberth_roots(p).roots) <= 1e-8


def test_mobius_degree6_random_complex():
    p = gen_kostlan(6, 42, real=False)
    theta = 1.234
    back = [mobius_pullback(z, theta) for z in np.roots(mobius_transform(p, theta).coeffs[::-1])]
    assert match_rootsets(back, np.roots(p.coeffs[::-1])) <= 1e-9


def test_mobius_pullback_examples():
    assert mobius_pullback(2.5 - 1j, 0.0) == 2.5 - 1j
    theta = 0.3
    assert abs(mobius_pullback(math.tan(theta), theta)) <= 1e-16
    for r in (0.3 + 2j, -4.0, 1e3j):
        z = mobius_pullback(r, theta)
        assert abs(mobius_pullback(z, -theta) - r) <= 1e-12 * max(1, abs(r))
    # theta = 0.1: -cos/sin rounds to a point where the denominator is exactly 0
    pole = -math.cos(0.1) / math.sin(0.1)
    with pytest.raises(ZeroDivisionError, match="root at pole"):
        mobius_pullback(pole, 0.1)


def test_kostlan_determinism_and_shape():
    a, b = gen_kostlan(20, 7), gen_kostlan(20, 7)
    assert a == b and a.is_real and a.degree == 20
    c = gen_kostlan(20, 7, real=False)
    assert not c.is_real
    with pytest.raises(ValueError):
        gen_kostlan(0, 1)


def test_kostlan_variance_monte_carlo():
    n = 10_000
    c1 = np.array([gen_kostlan(1, s).coeffs.real for s in range(n)])
    np.testing.assert_allclose(c1.var(axis=0), [1, 1], rtol=0.1)
    c4 = np.array([gen_kostlan(4, s).coeffs.real for s in range(n)])
    np.testing.assert_allclose(c4.var(axis=0), [1, 4, 6, 4, 1], rtol=0.1)
    z4 = np.array([gen_kostlan(4, s, real=False).coeffs for s in range(n)])
    np.testing.assert_allclose(np.mean(np.abs(z4) ** 2, axis=0), [1, 4, 6, 4, 1], rtol=0.1)


def test_perfidious_examples():
    assert gen_perfidious(2) == Polynomial([2, -3, 1])
    assert gen_perfidious(3) == Polynomial([-6, 11, -6, 1])
    assert gen_perfidious(10).coeffs[0] == 3628800
    for d in (0, 26):
        with pytest.raises(ValueError):
            gen_perfidious(d)


@pytest.mark.parametrize("d", range(1, 26))
def test_perfidious_roots_have_small_backward_error(d):
    p = gen_perfidious(d)
    assert max(backward_error(p, k) for k in range(1, d + 1)) <= 1e-13


def test_chebyshev_examples():
    assert gen_chebyshev(1) == Polynomial([0, 1])
    assert gen_chebyshev(2) == Polynomial([-0.5, 0, 1])
    p = gen_chebyshev(10)
    assert np.max(np.abs(eval_poly(p, chebyshev_roots(10)))) <= 1e-12
    # T_3 = 4x^3 - 3x, monic
    assert gen_chebyshev(3) == Polynomial([0, -0.75, 0, 1])


def test_chebyshev_agrees_with_product_form():
    for d in (5, 12, 20):
        prod = np.poly(chebyshev_roots(d))[::-1]
        np.testing.assert_allclose(gen_chebyshev(d).coeffs.real, prod, atol=1e-12)


def test_backward_error_examples():
    assert backward_error(Polynomial([-1, 0, 1]), 1.0) == 0.0
    assert backward_error(Polynomial([-1, 1]), 1 + 1e-8) == pytest.approx(5e-9, rel=1e-6)
    p = gen_kostlan(10, 1)
    assert 0.01 < backward_error(p, 1e6) <= 1.0


@given(st.floats(-1e10, 1e10).filter(lambda c: abs(c) > 1e-10), st.complex_numbers(max_magnitude=100))
def test_backward_error_scale_invariant(c, z):
    p = gen_kostlan(7, 3)
    assert abs(backward_error(p.scaled(c), z) - backward_error(p, z)) <= 1e-15


def test_text_roundtrip(tmp_path):
    for p in (gen_kostlan(5, 1), gen_kostlan(4, 2, real=False), Polynomial([0.1, 1e-300, 3e300])):
        path = tmp_path / "p.txt"
        write_poly(p, path)
        q = read_poly(path)
        assert q == p and q.is_real == p.is_real


def test_parse_comments_and_scientific():
    p = parse_poly("# header comment\nd 2 complex\n1e0 0\n\n-2.5E-1 3\n# mid\n1 0\n")
    assert p == Polynomial([1, -0.25 + 3j, 1])


@pytest.mark.parametrize(
    "text, line",
    [
        ("d 2 real\n1\nfoo\n1\n", 3),
        ("d 2 real\n1\n2\n", 4),
        ("x 2 real\n1\n2\n3\n", 1),
        ("d 1 complex\n1 0\n2\n", 3),
        ("d 1 real\n1\n0\n", 3),
        ("d 1 real\n1\n1\n1\n", 4),
        ("", 1),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(PolyFormatError) as exc:
        parse_poly(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_format_is_header_then_coefficients():
    assert format_poly(Polynomial([2, -3, 1])) == "d 2 real\n2.0\n-3.0\n1.0\n"


def test_kostlan_large_degree_weights():
    p = gen_kostlan(1500, 0)
    assert np.all(np.isfinite(p.coeffs))
    w = math.sqrt(float(math.comb(1000, 500)))
    q = gen_kostlan(1000, 3)
    a = np.random.default_rng(3).standard_normal(1001)
    assert q.coeffs[500].real == pytest.approx(a[500] * w, rel=1e-15)
    with pytest.raises(ValueError):
        gen_kostlan(2100, 0)
