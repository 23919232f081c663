import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _util import poly_from_roots
from tangraeffe.oracle import aberth_roots, match_rootsets
from tangraeffe.poly import Polynomial, backward_error, gen_chebyshev, gen_kostlan, gen_perfidious
from tangraeffe.solver import (
    SolveOptions,
    StopReason,
    canonical_order,
    polish_newton,
    solve,
)


def test_quadratic():
    rep = solve(Polynomial([2, -3, 1]))
    np.testing.assert_allclose(rep.roots, [1, 2], rtol=1e-14)
    assert np.all(rep.backward_errors <= 1e-12)
    assert rep.stop_reason is StopReason.CONVERGED
    assert rep.zero_root_multiplicity == 0


def test_perfidious_10():
    rep = solve(gen_perfidious(10))
    assert np.max(np.abs(rep.roots - np.round(rep.roots.real))) <= 1e-6


def test_chebyshev_20():
    d = 20
    rep = solve(gen_chebyshev(d))
    m = (d * np.arccos(np.clip(rep.roots.real, -1, 1)) - np.pi / 2) / np.pi
    assert np.max(np.abs(m - np.round(m))) <= 1e-8
    assert np.all(rep.roots.imag == 0)


def test_unit_pair_real_mode():
    rep = solve(Polynomial([1, 0, 1]), SolveOptions(mode="real"))
    assert rep.roots[0] == 1j and rep.roots[1] == -1j


def test_zero_roots_are_counted():
    rep = solve(Polynomial([0, 0, 2, -3, 1]))
    assert rep.zero_root_multiplicity == 2
    np.testing.assert_allclose(rep.roots, [1, 2], rtol=1e-14)
    rep = solve(Polynomial([0, 0, 0, 3]))
    assert rep.zero_root_multiplicity == 3 and rep.roots.size == 0


def test_complex_mode_on_real_input():
    rep = solve(Polynomial([1, 0, 1]), SolveOptions(mode="complex"))
    np.testing.assert_allclose(sorted(rep.roots, key=lambda z: z.imag), [-1j, 1j], atol=1e-12)


def test_option_validation():
    for bad in ({"max_level": 0}, {"max_level": 41}, {"root_rtol": 0}, {"mode": "x"}, {"rho_initial": 1}):
        with pytest.raises(ValueError):
            SolveOptions(**bad)
    with pytest.raises(ValueError):
        solve(Polynomial([1j, 1]), SolveOptions(mode="real"))
    with pytest.raises(ValueError):
        solve(Polynomial([3.0]))


def test_level_cap_respected():
    rep = solve(gen_kostlan(12, 3), SolveOptions(max_level=2, polish=False))
    assert rep.iterations_used <= 2
    assert all(rec.level <= 2 for rec in rep.per_iteration)


def test_report_dict():
    rep = solve(Polynomial([2, -3, 1]))
    d = rep.to_dict()
    assert set(d) >= {"roots", "zero_multiplicity", "iterations", "backward_errors", "stop_reason"}
    assert d["roots"][0] == {"re": 1.0, "im": 0.0}
    assert d["stop_reason"] == "converged"


def test_canonical_order_examples():
    out = canonical_order([-1j, 2, 1j], "real")
    assert list(out) == [1j, -1j, 2]
    out = canonical_order([-3.0, 0.5, 2.0, -1.0], "real")
    assert list(out) == [0.5, -1.0, 2.0, -3.0]
    out = canonical_order([-3.0, 3.0], "complex")
    assert list(out) == [3.0, -3.0]


def test_canonical_order_rejects_unpaired():
    with pytest.raises(ValueError):
        canonical_order([1j, 2.0], "real")


def test_polish_examples():
    p = Polynomial([-2, 0, 1])
    assert polish_newton(p, [math.sqrt(2)])[0] == math.sqrt(2)
    assert abs(polish_newton(p, [math.sqrt(2) + 1e-4], max_steps=5)[0] - math.sqrt(2)) <= 1e-15
    q = Polynomial([1, -2, 1])
    assert abs(polish_newton(q, [1.01], [2])[0] - 1) <= 1e-7


def test_polish_rejects_worse_steps():
    p = Polynomial([1, 0, 1])
    z = polish_newton(p, [0.0 + 0j])[0]
    assert z == 0


@pytest.mark.parametrize("c", [1e-5, 1.0, 1e5])
def test_scale_invariance(c):
    for s in range(6):
        p = gen_kostlan(4 + 3 * s, s, real=s % 2 == 0)
        a, b = solve(p).roots, solve(p.scaled(c)).roots
        assert np.max(np.abs(a - b) / np.abs(a)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10_000), st.booleans(), st.integers(0, 3))
def test_root_count_conserved(d, seed, real, zeros):
    p = gen_kostlan(d, seed, real=real)
    p = Polynomial(np.r_[np.zeros(zeros), p.coeffs], p.is_real)
    rep = solve(p)
    assert rep.roots.size + rep.zero_root_multiplicity == p.degree
    assert rep.backward_errors.size == rep.roots.size


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10_000))
def test_real_mode_conjugate_closure(d, seed):
    roots = solve(gen_kostlan(d, seed)).roots
    nonreal = roots[roots.imag != 0]
    assert sorted(map(complex, nonreal), key=lambda z: (z.real, z.imag)) == sorted(
        map(complex, nonreal.conjugate()), key=lambda z: (z.real, z.imag)
    )
    for u, w in zip(roots[:-1], roots[1:]):
        if u.imag > 0:
            assert w == u.conjugate()


def test_matches_oracle_on_random_polynomials():
    for real in (True, False):
        hits = 0
        for s in range(100):
            d = 2 + (7 * s) % 49
            p = gen_kostlan(d, 1000 + s, real=real)
            rep = solve(p)
            ref = aberth_roots(p).roots
            if match_rootsets(rep.roots, ref) <= 1e-6:
                hits += 1
            else:
                # a miss only counts against the solver if its residuals are worse
                ref_bw = max(backward_error(p, z) for z in ref)
                assert ref_bw > np.max(rep.backward_errors)
        assert hits >= 95


@pytest.mark.parametrize("d", [10, 50, 100])
def test_residual_certificate(d):
    for s in range(3):
        for real in (True, False):
            rep = solve(gen_kostlan(d, s, real=real))
            assert np.all(rep.backward_errors <= 1e-8)


def test_double_root_polished():
    rep = solve(poly_from_roots([1 + 1j, 1 + 1j, 3]), SolveOptions(mode="complex"))
    assert match_rootsets(rep.roots, [1 + 1j, 1 + 1j, 3]) <= 1e-7


def test_equal_modulus_complex_roots():
    # not circle-free: a transformed attempt must separate the moduli
    roots = [2.0, 2j, -2.0, 0.5 + 0.5j]
    rep = solve(poly_from_roots(roots, False), SolveOptions(mode="complex"))
    assert match_rootsets(rep.roots, roots) <= 1e-10
    assert rep.theta_used != 0.0
