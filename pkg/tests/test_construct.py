import math

import numpy as np
import pytest
from conftest import P
from hypothesis import given, settings
from hypothesis import strategies as st

from stablepoly import construct as C
from stablepoly.factcheck import bezout_pointwise_error
from stablepoly.interlace import Relation, check_relation
from stablepoly.polycore import MultiPoly, UniPoly, evaluate, partial_derivative
from stablepoly.stability import SamplerConfig, StableByCertificate, Unstable, decide
from stablepoly.uniroots import hurwitz_verdict, p_interlaces

CFG = SamplerConfig(trials=200)


# -- pencils -------------------------------------------------------------------------


def test_scalar_pencil():
    spec = C.PencilSpec(([[2.0]], [[3.0]]))
    assert C.det_pencil(spec).poly == P("1 + 2*x1 + 3*x2")


def test_skew_pencil_by_hand():
    spec = C.PencilSpec((np.eye(2),), "skew", [[0, 1], [-1, 0]])
    cert = C.det_pencil(spec)
    assert cert.kind == "det_pencil_skew"
    assert cert.poly.allclose(P("x1^2 + 2*x1 + 2"))


def test_imagsym_pencil_is_complex():
    cert = C.det_pencil(C.PencilSpec.random(2, 2, "imagsym", seed=4))
    assert cert.kind == "det_pencil_imag" and not cert.poly.is_real()


@pytest.mark.parametrize("tail", C.TAIL_KINDS)
def test_random_pencils_survive(tail):
    for seed in range(8):
        n, d = 1 + seed % 4, 1 + seed % 3
        cert = C.det_pencil(C.PencilSpec.random(n, d, tail, seed=seed))
        assert not isinstance(decide(cert.poly, SamplerConfig(trials=300, seed=seed)), Unstable)
        assert decide(cert.poly, certificate=cert.kind) == StableByCertificate(cert.kind)
        assert cert.poly.degree <= n * d and all(cert.poly.degree_in(j) <= n for j in range(d))
        if tail != "imagsym":
            c = np.array(list(cert.poly.terms.values()))
            assert np.all(np.abs(c.imag) < 1e-12) and (np.all(c.real > 0) or np.all(c.real < 0))


def test_minors_and_interpolation_agree():
    spec = C.PencilSpec.random(4, 2, "skew", seed=11)
    a = C._pencil_by_minors(spec)
    b = C._pencil_by_interpolation(spec)
    assert a.allclose(b, rtol=1e-9, atol=1e-9)


def test_large_pencil_uses_interpolation():
    spec = C.PencilSpec.random(9, 1, seed=2)
    p = C.det_pencil(spec).poly
    x = 0.37 + 0.2j
    direct = np.linalg.det(spec.constant_matrix() + x * spec.D[0])
    assert abs(evaluate(p, (x,)) - direct) < 1e-8 * abs(direct)


def test_pencil_validation():
    with pytest.raises(ValueError):
        C.PencilSpec(([[1.0, 2.0], [2.0, 1.0]],))  # indefinite
    with pytest.raises(ValueError):
        C.PencilSpec(([[1.0, 0.5], [0.4, 1.0]],))  # not symmetric
    with pytest.raises(ValueError):
        C.PencilSpec((np.eye(2),), "skew", [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        C.PencilSpec((np.eye(2),), "imagsym", [[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        C.PencilSpec((np.eye(13),))


def test_pencil_json_roundtrip():
    spec = C.PencilSpec.random(3, 2, "skew", seed=5)
    back = C.PencilSpec.from_json(spec.to_json())
    assert C.det_pencil(back).poly == C.det_pencil(spec).poly


def test_random_matrices():
    assert C.random_pd(1, 0)[0, 0] > 0
    assert np.all(np.diag(C.random_skew(4, 1)) == 0)
    for s in range(20):
        assert np.linalg.eigvalsh(C.random_pd(4, s)).min() >= 1e-3 - 1e-12
    s = C.random_sym(3, 2)
    assert np.array_equal(s, s.T)


# -- Bezoutian and Wronskian ------------------------------------------------------------


def test_bezout_linear():
    assert C.bezout(UniPoly([1, 1]), UniPoly([1])) == P("1", 2)


def test_bezout_quadratic_pointwise():
    f, g = UniPoly([2, 3, 1]), UniPoly([3, 2])
    B = C.bezout(f, g)
    assert bezout_pointwise_error(f, g, B, np.random.default_rng(0)) < 1e-10
    # B(x, y) = (f(x) g(y) - f(y) g(x)) / (x - y) = 5 + 3x + 3y + 2xy
    assert B.allclose(P("5 + 3*x1 + 3*x2 + 2*x1*x2"))


def test_bezout_diagonal_is_wronskian():
    # B(x, x) = f' g - f g' = -W(f, g)
    rng = np.random.default_rng(1)
    f, g = UniPoly([2, 3, 1]) * UniPoly([5, 1]), UniPoly([3, 2, 0.5])
    B = C.bezout(f, g)
    w = C.wronskian(f, g)
    for x in rng.normal(size=20) + 1j * rng.normal(size=20):
        assert abs(evaluate(B, (x, x)) + w(x)) <= 1e-10 * max(1.0, abs(w(x)))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_bezout_symmetric(seed):
    rng = np.random.default_rng(seed)
    f = UniPoly(rng.normal(size=int(rng.integers(2, 7))))
    g = UniPoly(rng.normal(size=int(rng.integers(1, 6))))
    B = C.bezout(f, g)
    swapped = B.permute([1, 0])
    assert swapped.allclose(B, rtol=1e-12, atol=1e-12 * B.max_abs())


def test_wronskian_examples():
    assert C.wronskian(UniPoly([1, 1]), UniPoly([1])) == UniPoly([-1])
    f = UniPoly([2, 3, 1])
    w = C.wronskian(f.deriv(), f)  # f' f' - f'' f
    assert w.allclose(UniPoly([5, 6, 2]))
    assert hurwitz_verdict(w).stable
    assert C.wronskian(f, f).is_zero()


# -- orthogonal families --------------------------------------------------------------


def test_cd_first_members():
    fam = C.OrthoFamily.custom([1, 1, 1], [0, 0, 0], [1, 1, 1])
    total, det = C.christoffel_darboux(fam, 1)
    assert total.allclose(UniPoly([1, 0, 1])) and det.allclose(total)
    assert hurwitz_verdict(total).stable


def test_cd_legendre_n3():
    total, det = C.christoffel_darboux(C.OrthoFamily.legendre(), 3)
    assert np.max(np.abs((total - det).coeffs), initial=0.0) < 1e-10 * np.max(np.abs(total.coeffs))


def test_cd_base_case():
    total, det = C.christoffel_darboux(C.OrthoFamily.chebyshev_t(), 0)
    assert total.allclose(det) and total.degree == 0


@pytest.mark.parametrize("family", [C.OrthoFamily.legendre(), C.OrthoFamily.chebyshev_t(), C.OrthoFamily.hermite_e()])
def test_cd_identity_and_stability(family):
    for n in range(9):
        total, det = C.christoffel_darboux(family, n)
        assert np.max(np.abs((total - det).coeffs), initial=0.0) < 1e-8 * np.max(np.abs(total.coeffs))
        assert hurwitz_verdict(total).margin >= -1e-9


def test_cd_rejects_bad_recurrence():
    with pytest.raises(ValueError):
        C.christoffel_darboux(C.OrthoFamily.custom([1, 1, 1], [0, 0, 0], [1, -1, 1]), 1)


# -- coefficient transforms --------------------------------------------------------------


def test_hadamard_examples():
    y1 = P("1 + x1")
    assert C.hadamard(UniPoly([1, 1]), y1, 0) == y1
    sq = UniPoly([1, 2, 1])
    h = C.hadamard(sq, sq.to_multi(), 0)
    assert h == P("x1^2 + 4*x1 + 1")
    assert hurwitz_verdict(UniPoly.from_multi(h)).stable
    assert C.hadamard(UniPoly([1, 0, 0]), P("x1^2 + x1"), 0).is_zero()
    with pytest.raises(IndexError):
        C.hadamard(sq, y1, 2)


def test_exp_transform_examples():
    e = C.exp_transform(P("x1^2 + 2*x1 + 1"), 0)
    assert e == P("(0.5+0i)*x1^2 + 2*x1 + 1")
    assert hurwitz_verdict(UniPoly.from_multi(e)).stable
    assert C.exp_transform(P("3", 1), 0) == P("3", 1)
    f = P("x1^3 + x1^2*x2 + 1")
    twice = C.exp_transform(C.exp_transform(f, 0), 0)
    assert twice.allclose(MultiPoly(2, {e: c / math.factorial(e[0]) ** 2 for e, c in f.terms.items()}))


def test_hankel_examples():
    assert C.coeff_hankel_det(P("(1 + x1)*(1 + x2)"), 1, 2) == P("-(1 + x1)^2")
    assert C.coeff_hankel_det(P("(1 + x1)^2"), 0, 2).allclose(P("-3", 0))
    with pytest.raises(IndexError):
        C.coeff_hankel_det(P("x1"), 0, 0)


def test_alpha_two_det_examples():
    lhs, rhs = C.alpha_two_det(P("(1 + x1)^2"), 0, 1.0)
    assert lhs.allclose(P("1", 0)) and rhs.allclose(P("3", 0))
    lhs, rhs = C.alpha_two_det(P("(1 + x1)*(1 + x2)"), 1, 1.0)
    assert lhs.allclose(P("(1 + x1)^2")) and rhs.allclose(lhs)
    with pytest.raises(ValueError):
        C.alpha_two_det(P("x1"), 0, 2.0)


def test_alpha_two_det_sim_h_on_pencils():
    for seed in range(6):
        F = C.det_pencil(C.PencilSpec.random(2, 2, seed=seed, positive=True)).poly
        for alpha in (0.5, 1.0, 1.5):
            lhs, rhs = C.alpha_two_det(F, 1, alpha)
            assert check_relation(lhs, rhs, Relation.Hsim).holds == "yes"


def test_pencil_coeff_det_scalar():
    spec = C.PencilSpec(([[1.5]], [[2.0]], [[3.0]]))
    assert C.pencil_coeff_det(spec).allclose(UniPoly([-6.0]))


def test_pencil_coeff_det_random():
    for seed in range(50):
        assert hurwitz_verdict(C.pencil_coeff_det(C.random_pencil_coeff_spec(2, seed))).stable


def test_pencil_coeff_det_validation():
    with pytest.raises(ValueError):
        C.pencil_coeff_det(C.PencilSpec((np.eye(2), np.eye(2), np.eye(2))))  # zero off-diagonal entries


# -- generators -----------------------------------------------------------------------


def test_random_stable_recipes():
    c = C.random_stable(3, 1, seed=0, recipe="product")
    assert c.poly.degree == 1
    c = C.random_stable(2, 3, seed=1, recipe="pencil")
    assert not isinstance(decide(c.poly, CFG), Unstable)
    with pytest.raises(ValueError):
        C.random_stable(2, 0, seed=1)


def test_random_stable_deterministic():
    assert C.random_stable(2, 3, seed=42).poly == C.random_stable(2, 3, seed=42).poly


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from(C.RECIPES))
def test_derivative_of_certified_never_refuted(seed, recipe):
    f = C.random_stable(2, 3, seed=seed, recipe=recipe).poly
    d = partial_derivative(f, seed % 2)
    assert d.is_zero() or not isinstance(decide(d, SamplerConfig(trials=64, seed=seed)), Unstable)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_interlacing_partner_is_p_partner(seed):
    rng = np.random.default_rng(seed)
    f = C.random_ppos1(int(rng.integers(1, 6)), rng)
    roots = np.sort(np.roots(f.coeffs[::-1]).real)
    g = C.interlacing_partner(roots, rng, same_degree=bool(seed % 2))
    assert p_interlaces(f, g)
