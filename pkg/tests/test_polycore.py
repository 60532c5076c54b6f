import pytest
from conftest import P, multipolys, points
from hypothesis import given
from hypothesis import strategies as st

from stablepoly.polycore import (
    AffineSubstitution,
    FixValue,
    Keep,
    MultiPoly,
    PolySyntaxError,
    RenameTo,
    Rotation,
    SplitSum,
    UniPoly,
    affine_substitute,
    coefficient_slice,
    evaluate,
    even_odd_parts,
    fix_others,
    format_text,
    parse_text,
    partial_derivative,
    restrict_line,
    reverse_in_var,
    rotate_halfplane,
    top_homogeneous,
)

# -- parsing -------------------------------------------------------------------------


def test_parse_literal_readback():
    f = parse_text("(1+0i) + (1+0i)*x1")
    assert f.nvars == 1 and f == MultiPoly(1, {(0,): 1, (1,): 1})


def test_parse_cancellation_gives_zero():
    f = parse_text("x1*x2 - x1*x2")
    assert f.is_zero() and dict(f.terms) == {} and f.degree == -1


def test_parse_imaginary_coefficient():
    f = parse_text("(0+2i)*x1^2*x2")
    assert dict(f.terms) == {(2, 1): 2j}


@pytest.mark.parametrize("bad", ["", "x1 +", "(1+2*x1", "x1^", "x0", "3 ** x1"])
def test_parse_errors(bad):
    with pytest.raises(PolySyntaxError):
        parse_text(bad)


def test_parse_error_carries_position():
    with pytest.raises(PolySyntaxError) as e:
        parse_text("x1 + + x2")
    assert e.value.pos == 5


def test_parse_variable_out_of_declared_range():
    with pytest.raises(PolySyntaxError):
        parse_text("x3", nvars=2)


@given(multipolys())
def test_format_parse_roundtrip(f):
    assert parse_text(format_text(f), f.nvars) == f


@given(multipolys())
def test_json_roundtrip(f):
    assert MultiPoly.from_json(f.to_json()) == f


# -- evaluation and arithmetic ---------------------------------------------------------


def test_eval_examples():
    assert evaluate(P("1 - x1*x2"), (1, 1)) == 0
    assert evaluate(P("1 + x1"), (1j,)) == 1 + 1j


def test_eval_bilinear_root_matches_closed_form():
    f = P("1 + x1 + x2 + x1*x2")
    # f(1, y) = 2 + 2y vanishes at y = -1; closed form at r = 1, s = 0 gives -4/4
    a = b = c = d = 1.0
    r, s = 1.0, 0.0
    re_y = -(a * c + b * c * r + a * d * r + b * d * r**2 + b * d * s**2) / ((c + d * r) ** 2 + d**2 * s**2)
    assert re_y == -1.0 and evaluate(f, (1, -1)) == 0


def test_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        evaluate(P("x1*x2"), (1,))


def test_arithmetic_examples():
    assert P("(1+x1)*(1+x2)") == P("1 + x1 + x2 + x1*x2")
    f = P("x1^2 + (0+1i)*x2")
    assert (f + f.scale(-1)).is_zero()
    assert P("x1+1") * P("x1+2") == P("x1^2 + 3*x1 + 2")


def test_dimension_mismatch_in_arithmetic():
    with pytest.raises(ValueError):
        P("x1") + P("x1*x2")


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(multipolys(d), multipolys(d), points(d))))
def test_eval_is_multiplicative(args):
    f, g, p = args
    lhs = evaluate(f * g, p)
    rhs = evaluate(f, p) * evaluate(g, p)
    scale = max(1.0, sum(abs(c) for c in (f * g).terms.values()) * max(1.0, max(abs(z) for z in p)) ** 6)
    assert abs(lhs - rhs) <= 1e-10 * scale


# -- substitutions --------------------------------------------------------------------


def test_fix_value():
    f = P("1 + x1 + x2 + x1*x2")
    assert affine_substitute(f, AffineSubstitution([FixValue(1), Keep()])) == P("2 + 2*x1")


def test_rename_diagonalizes():
    f = P("1 + x1 + x2 + x1*x2")
    assert affine_substitute(f, AffineSubstitution([Keep(), RenameTo(0)])) == P("1 + 2*x1 + x1^2")


def test_split_sum_appends_fresh_variable():
    assert affine_substitute(P("x1"), AffineSubstitution([SplitSum()])) == P("x1 + x2")


def test_malformed_substitution():
    with pytest.raises(ValueError):
        affine_substitute(P("x1*x2"), AffineSubstitution([Keep()]))
    with pytest.raises(ValueError):
        affine_substitute(P("x1*x2"), AffineSubstitution([RenameTo(1), FixValue(2)]))


# -- derivatives and slices -------------------------------------------------------------


def test_partial_derivative_examples():
    assert partial_derivative(P("x1^2 + 3*x1 + 2"), 0) == P("2*x1 + 3")
    assert partial_derivative(P("1 + x1", 2), 1).is_zero()
    assert partial_derivative(P("x1*x2"), 0) == P("x2", 2)
    with pytest.raises(IndexError):
        partial_derivative(P("x1"), 1)


def test_coefficient_slice_examples():
    f = P("1 + x1 + (2 + x1)*x2")
    assert coefficient_slice(f, 1, 1) == P("2 + x1")
    assert coefficient_slice(f, 1, 5).is_zero()
    g = P("(1+x1)*(1+x2)")
    assert coefficient_slice(g, 1, 0) == coefficient_slice(g, 1, 1) == P("1 + x1")


def test_reverse_examples():
    assert reverse_in_var(P("2 + x1 + x2"), 1) == P("(2 + x1)*x2 + 1")
    f = P("(1 + x1) + (1 + x1)*x2")
    assert reverse_in_var(f, 1) == f
    assert reverse_in_var(P("x1^2 + 3*x1 + 2"), 0) == P("2*x1^2 + 3*x1 + 1")


@given(multipolys())
def test_reverse_is_involution_with_nonzero_constant_slice(f):
    j = 0
    if coefficient_slice(f, j, 0).is_zero():
        f = f + MultiPoly.constant(1.0, f.nvars)
    assert reverse_in_var(reverse_in_var(f, j), j).allclose(f)


def test_even_odd_examples():
    assert even_odd_parts(P("x1^3 + 6*x1^2 + 11*x1 + 6")) == (P("6*x1^2 + 6"), P("x1^3 + 11*x1"))
    e, o = even_odd_parts(P("x1*x2 + 1"))
    assert e == P("x1*x2 + 1") and o.is_zero()
    e, o = even_odd_parts(P("x1 + x2"))
    assert e.is_zero() and o == P("x1 + x2")


@given(multipolys())
def test_even_odd_sum_exactly(f):
    e, o = even_odd_parts(f)
    assert e.add(o, exact=True) == f


def test_top_homogeneous_examples():
    assert top_homogeneous(P("1 + x1 + x1*x2")) == P("x1*x2")
    assert top_homogeneous(P("(x1 + 1)*(x2 + 2)")) == P("x1*x2")
    h = P("x1^2 + 3*x1*x2")
    assert top_homogeneous(h) == h
    with pytest.raises(ValueError):
        top_homogeneous(MultiPoly.zero(2))


# -- rotations and restrictions -----------------------------------------------------------


def test_rotation_examples():
    up = rotate_halfplane(P("x1 + 1"), Rotation.STABLE_TO_UPPER)
    assert up == MultiPoly(1, {(0,): 1, (1,): -1j})
    back = rotate_halfplane(P("x1 + (0+1i)"), Rotation.UPPER_TO_STABLE)
    assert back == MultiPoly(1, {(0,): 1j, (1,): 1j})


@given(multipolys())
def test_rotation_roundtrip(f):
    g = rotate_halfplane(rotate_halfplane(f, Rotation.STABLE_TO_UPPER), Rotation.UPPER_TO_STABLE)
    assert g.allclose(f, rtol=1e-12)


def test_restrict_line_examples():
    assert restrict_line(P("x1*x2"), (0, 0), (1, 1)).allclose(UniPoly([0, 0, 1]))
    assert restrict_line(P("1 + x1 + x2"), (1j, 0), (1, 2)).allclose(UniPoly([1 + 1j, 3]))
    with pytest.raises(ValueError):
        restrict_line(P("x1*x2"), (0, 0), (0, 0))


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(multipolys(d), points(d), st.lists(st.floats(-2, 2), min_size=d, max_size=d))))
def test_restriction_degree_bound(args):
    f, base, direction = args
    if not any(direction):
        direction[0] = 1.0
    assert restrict_line(f, base, direction).degree <= f.degree


@given(st.integers(2, 3).flatmap(lambda d: st.tuples(multipolys(d), points(d), st.integers(0, d - 1))))
def test_axis_restriction_equals_fixing_others(args):
    f, base, j = args
    base = tuple(0 if k == j else z for k, z in enumerate(base))
    direction = [1.0 if k == j else 0.0 for k in range(f.nvars)]
    a = restrict_line(f, base, direction)
    b = fix_others(f, j, base)
    assert a.allclose(b, rtol=1e-10)
