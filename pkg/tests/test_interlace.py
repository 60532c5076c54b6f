import numpy as np
import pytest
from conftest import P
from hypothesis import given, settings
from hypothesis import strategies as st

from stablepoly import construct as C
from stablepoly.interlace import (
    Region,
    Relation,
    RelationVerdict,
    check_relation,
    coefficient_chain_check,
    h_axis_check,
    hermite_biehler_check,
    hsim_root_locus,
    ratio_region_check,
)
from stablepoly.polycore import MultiPoly, UniPoly, partial_derivative
from stablepoly.stability import SamplerConfig, Unstable, decide, join_with_fresh_var, upper_witness_ok, witness_ok
from stablepoly.uniroots import hurwitz_verdict, p_interlaces

CFG = SamplerConfig(trials=200)
F = P("x1*(x1 + 3)")
G = P("(x1 + 1)*(x1 + 2)")


def holds(v: RelationVerdict) -> bool:
    return v.holds in ("yes", "probably")


# -- the worked examples ------------------------------------------------------------------


def test_ppos_pair():
    assert check_relation(F, G, Relation.Psim, CFG).holds == "yes"
    v = check_relation(F, G, Relation.P, CFG)
    assert v.holds == "no" and v.method == "root_interlacing"
    assert upper_witness_ok(join_with_fresh_var(F, G), v.witness)


def test_square_vs_one():
    x2, one = P("x1^2"), P("1", 1)
    assert check_relation(x2, one, Relation.Hsim, CFG).holds == "yes"
    v = check_relation(x2, one, Relation.H, CFG)
    assert v.holds == "no" and witness_ok(join_with_fresh_var(x2, one), v.witness)


def test_derivative_interlaces():
    f = P("(1 + x1)*(2 + x1)")
    assert holds(check_relation(f, partial_derivative(f, 0), Relation.H, CFG))


def test_multivariate_join_path():
    f = P("(1 + x1)*(2 + x2)")
    v = check_relation(f, partial_derivative(f, 1), Relation.H, CFG)
    assert v.holds == "probably" and v.method == "join"
    v = check_relation(P("x1^2 + x2^2", 2), P("1", 2), Relation.H, CFG)
    assert v.holds == "no" and witness_ok(join_with_fresh_var(P("x1^2 + x2^2", 2), P("1", 2)), v.witness)


def test_relation_errors():
    with pytest.raises(ValueError):
        check_relation(P("x1"), P("x1*x2"), Relation.H)
    with pytest.raises(ValueError):
        check_relation(MultiPoly.zero(1), P("x1"), Relation.H)
    with pytest.raises(ValueError):
        check_relation(P("x1"), P("x1"), "Q")


# -- ratio maps -----------------------------------------------------------------------


def test_ratio_examples():
    assert ratio_region_check(UniPoly([0, 0, 1]), UniPoly([1]), Region.SlitPlane)
    assert ratio_region_check(UniPoly([2, 3, 1]), UniPoly([1.5, 1]), Region.Quadrant1)
    r = ratio_region_check(UniPoly([-1, 1]), UniPoly([1]), Region.ClosedRHP)
    assert not r and r.image.real < 0 and r.sigma.real > 0 and r.sigma.imag >= 0


def test_ratio_rejects_zero_denominator():
    with pytest.raises(ValueError):
        ratio_region_check(UniPoly([1, 1]), UniPoly([]), Region.OpenRHP)


def test_ratio_slit_plane_catches_sign_crossing():
    # x^2 / -1 sends the diagonal of Q1 to the negative imaginary axis, and i*0.5 to 0.25 > 0
    r = ratio_region_check(UniPoly([1, 1]), UniPoly([-1]), Region.SlitPlane)
    assert not r


def test_quadrant_criterion_if_direction_fails():
    # f/g maps Q1 into Q1, yet f + y g has a zero with x and y in the upper half plane
    f = UniPoly.from_roots([-3.6, -1.8])
    g = UniPoly.from_roots([-4.8])
    assert ratio_region_check(f, g, Region.Quadrant1)
    assert not p_interlaces(f, g)
    v = check_relation(f, g, Relation.P)
    assert v.holds == "no" and upper_witness_ok(join_with_fresh_var(f.to_multi(), g.to_multi()), v.witness)


# -- exact univariate decisions ---------------------------------------------------------


def test_axis_check_witness_beyond_sampling_radius():
    f = UniPoly(UniPoly.from_roots([-2.5472 + 0.9254j, -2.5472 - 0.9254j]).coeffs.real)
    g = UniPoly(UniPoly.from_roots([-1.2397 + 1.5841j, -1.2397 - 1.5841j, -2.4599]).coeffs.real)
    ok, w = h_axis_check(f, g)
    assert not ok and abs(w[0].imag) > 4
    assert witness_ok(join_with_fresh_var(f.to_multi(), g.to_multi()), w)


def _hurwitz(rng, deg):
    return C.random_hurwitz_real(deg, rng)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_axis_check_agrees_with_join_sampling(seed):
    rng = np.random.default_rng(seed)
    f = _hurwitz(rng, int(rng.integers(1, 4)))
    g = _hurwitz(rng, max(1, f.degree + int(rng.integers(-1, 2))))
    ok, w = h_axis_check(f, g)
    j = join_with_fresh_var(f.to_multi(), g.to_multi())
    if ok:
        assert not isinstance(decide(j, SamplerConfig(trials=300, seed=seed)), Unstable)
    elif w is not None:
        assert witness_ok(j, w)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_root_locus_agrees_with_r_sweep(seed):
    rng = np.random.default_rng(seed)
    f = _hurwitz(rng, int(rng.integers(1, 4)))
    g = _hurwitz(rng, int(rng.integers(1, 4)))
    ok, r = hsim_root_locus(f, g)
    def member(t):
        p = f + g * t
        c = p.coeffs.real
        return np.all(c >= -1e-12 * np.max(np.abs(c))) and (p.degree < 1 or hurwitz_verdict(p).stable)

    if ok:
        assert all(member(t) for t in np.logspace(-3, 3, 61))
    else:
        assert not member(r)


# -- Hermite-Biehler ------------------------------------------------------------------


def test_hermite_biehler_examples():
    assert holds(hermite_biehler_check(P("x1^3 + 6*x1^2 + 11*x1 + 6")))
    v = hermite_biehler_check(P("x1 - 1"))
    assert v.holds == "no" and v.witness == (1, 1)
    v = hermite_biehler_check(P("x1^2 + 1"))
    assert v.method == "direct" and holds(v)


def test_hermite_biehler_needs_real_coefficients():
    with pytest.raises(ValueError):
        hermite_biehler_check(P("x1 + (0+1i)"))


def test_hermite_biehler_multivariate():
    assert holds(hermite_biehler_check(P("(1 + x1)*(1 + x2)*(2 + x1 + x2)"), CFG))
    assert hermite_biehler_check(P("(1 + x1)*(x2 + x1 - 1)"), CFG).holds == "no"


# -- coefficient chains -------------------------------------------------------------


def test_chain_examples():
    out = coefficient_chain_check(P("(1 + x1)^3"), 0, CFG)
    assert out and all(holds(v) for v in out)
    out = coefficient_chain_check(P("(1 + x1)*(1 + x2)"), 1, CFG)
    assert all(holds(v) for v in out)


def test_chain_on_pencils():
    for seed in range(10):
        F = C.det_pencil(C.PencilSpec.random(3, 2, seed=seed)).poly
        assert all(holds(v) for v in coefficient_chain_check(F, 1, SamplerConfig(trials=100, seed=seed)))


def test_chain_index_error():
    with pytest.raises(IndexError):
        coefficient_chain_check(P("x1"), 3)


# -- algebraic properties ------------------------------------------------------------


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_h_symmetry(seed):
    rng = np.random.default_rng(seed)
    f = C.random_hurwitz_real(int(rng.integers(1, 5)), rng)
    g = f.deriv() * float(rng.uniform(0, 2)) + f * float(rng.uniform(0, 2))
    if g.is_zero():
        return
    assert check_relation(f, g, Relation.H).holds == check_relation(g, f, Relation.H).holds


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_h_linearity(seed):
    rng = np.random.default_rng(seed)
    f = C.random_hurwitz_real(int(rng.integers(2, 5)), rng)
    g = f.deriv() * float(rng.uniform(0.1, 2)) + f * float(rng.uniform(0, 1))
    h = f.deriv() * float(rng.uniform(0.1, 2)) + f * float(rng.uniform(0, 1))
    assert check_relation(f, g, Relation.H).holds == "yes"
    assert check_relation(f, h, Relation.H).holds == "yes"
    assert check_relation(f, g + h, Relation.H).holds == "yes"


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_implication_lattice_from_p(seed):
    rng = np.random.default_rng(seed)
    f = C.random_ppos1(int(rng.integers(1, 5)), rng)
    roots = np.sort(np.roots(f.coeffs[::-1]).real)
    g = C.interlacing_partner(roots, rng, same_degree=bool(rng.uniform() < 0.5))
    assert check_relation(f, g, Relation.P).holds == "yes"
    for rel in (Relation.Psim, Relation.H, Relation.Hsim):
        assert check_relation(f, g, rel).holds == "yes", rel


def test_sim_h_multiplicative():
    f, g = UniPoly([0, 0, 1]), UniPoly([1])
    h = UniPoly.from_roots([-1, -2])
    assert check_relation(f, g, Relation.Hsim).holds == "yes"
    assert check_relation(f * h, h * g, Relation.Hsim).holds == "yes"
    bad_f, bad_g = UniPoly([0, 0, 0, 1]), UniPoly([1])
    assert check_relation(bad_f, bad_g, Relation.Hsim).holds == "no"
    assert check_relation(bad_f * h, h * bad_g, Relation.Hsim).holds == "no"


def test_fact11_item3_examples():
    f = UniPoly.from_roots([-1, -2])
    g = f.deriv()
    xg = UniPoly([0, 1]) * g
    assert check_relation(f, g, Relation.H).holds == "yes"
    assert check_relation(f, xg, Relation.Hsim).holds == "yes"
