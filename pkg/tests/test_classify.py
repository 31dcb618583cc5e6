import random
from fractions import Fraction as Q

import pytest

from plectic import catalog
from plectic.classify import (
    COMPLEX,
    DEGENERATE,
    FLAT,
    NONCONSTANT,
    NONFLAT,
    PRODUCT,
    TANGENT,
    EndField,
    classify6,
    extract_acs,
    flatness_report,
    hitchin_endomorphism,
    involutive,
    nijenhuis,
    nondegenerate,
    sign_on_chart,
    split_product,
    standard_volume,
    verify_standard_subspace,
)
from plectic.errors import (
    DependentFrame,
    NotAlmostComplex,
    NotClosed,
    WrongType,
)
from plectic.exterior import (
    chart,
    constant_linear_pullback,
    coordinate_vector,
    ext_d,
    form,
    interior,
    multivec,
    vf_bracket,
    wedge,
)
from plectic.hdw import multiphase_forms
from plectic.linalg import det
from plectic.scalar import RationalExpr, parse_expression

C6 = chart(6)
HALF = catalog.half_space6()
ORIGIN6 = [0] * 6


# -- non-degeneracy -------------------------------------------------------------


def test_g2_form_nondegenerate():
    assert nondegenerate(catalog.g2_form(), [0] * 7)
    assert nondegenerate(catalog.g2_form())


def test_s6_pole_form_nondegenerate():
    assert nondegenerate(catalog.s6_pole_form(), ORIGIN6)


def test_degenerate_form_kernel():
    rep = nondegenerate(form(C6, 3, {(1, 2, 3): 1}), ORIGIN6)
    assert not rep
    assert set(tuple(k.coeffs) for k in rep.kernel) == {((4,),), ((5,),), ((6,),)}


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_symplectic_powers_nondegenerate(m):
    for j in range(1, m + 1):
        assert nondegenerate(catalog.symplectic_power(m, j))


# -- endomorphism extraction ------------------------------------------------------


def test_hitchin_matrix_for_family():
    w = catalog.omega_f("x2")
    J = hitchin_endomorphism(w, standard_volume(HALF))
    f = parse_expression("x2", 6)
    two = RationalExpr.const(6, 2)
    expected = [
        [0, -(two * f), 0, 0, 0, 0],
        [-2, 0, 0, 0, 0, 0],
        [0, 0, 0, -(two * f), 0, 0],
        [0, 0, -2, 0, 0, 0],
        [0, 0, 0, 0, 0, 2],
        [0, 0, 0, 0, two * f, 0],
    ]
    for i in range(6):
        for j in range(6):
            assert J.matrix[i][j] == expected[i][j], (i, j)
    assert J.square().trace() == parse_expression("24*x2", 6)


def test_hitchin_product_form():
    J = hitchin_endomorphism(catalog.product6(), standard_volume(C6))
    for i in range(6):
        for j in range(6):
            want = 0 if i != j else (1 if i < 3 else -1)
            assert J.matrix[i][j] == want
    assert J.square().trace() == 6


def test_hitchin_degenerate_gives_zero():
    J = hitchin_endomorphism(form(C6, 3, {(1, 2, 3): 1}), standard_volume(C6))
    assert all(not J.matrix[i][j] for i in range(6) for j in range(6))


# -- classification ----------------------------------------------------------------


def test_classify_trichotomy():
    assert classify6(catalog.product6(), ORIGIN6).linear_type == PRODUCT
    assert classify6(catalog.complex6(), ORIGIN6).linear_type == COMPLEX
    assert classify6(catalog.tangent6(), ORIGIN6).linear_type == TANGENT
    assert classify6(form(C6, 3, {(1, 2, 3): 1}), ORIGIN6).linear_type == DEGENERATE


def test_classify_requires_closed():
    w = form(C6, 3, {(1, 2, 3): "x4"})
    with pytest.raises(NotClosed):
        classify6(w, ORIGIN6)


def rand_gl6(rng):
    while True:
        M = [[Q(rng.randint(-2, 2)) for _ in range(6)] for _ in range(6)]
        if det([row[:] for row in M]):
            return M


@pytest.mark.parametrize("seed", range(8))
def test_classification_gl_invariant(seed):
    rng = random.Random(300 + seed)
    M = rand_gl6(rng)
    for w, expected in [
        (catalog.product6(), PRODUCT),
        (catalog.complex6(), COMPLEX),
        (catalog.tangent6(), TANGENT),
    ]:
        moved = constant_linear_pullback(w, M)
        assert classify6(moved, ORIGIN6).linear_type == expected


# -- product split ------------------------------------------------------------------


def test_split_already_split():
    w1, w2 = split_product(catalog.product6())
    assert {tuple(w1.coeffs), tuple(w2.coeffs)} == {((1, 2, 3),), ((4, 5, 6),)}
    assert w1 + w2 == catalog.product6()


def test_split_family_matches_alpha_product():
    w = catalog.omega_f("x2")
    w1, w2 = split_product(w)
    assert w1 + w2 == w
    assert wedge(w1, w1).is_zero and wedge(w2, w2).is_zero
    # dw1 is the witness computed in the worked example
    expected = form(HALF, 4, {
        (1, 2, 4, 5): parse_expression("1/4*x2^(-1/2)", 6),
        (1, 2, 3, 6): parse_expression("1/4*x2^(-3/2)", 6),
    })
    assert ext_d(w1) == expected
    # the pair's wedge is the induced volume 2 sqrt(x2) dx^123456
    vol = wedge(w1, w2)
    assert vol == form(HALF, 6, {tuple(range(1, 7)): parse_expression("2*x2^(1/2)", 6)})


def test_split_pointwise_exact():
    w = catalog.omega_f("x2")
    p = [0, 1, 0, 0, 0, 0]
    w1, w2 = split_product(w, point=p)
    we = w.eval_at(p)
    assert w1 + w2 == we
    assert wedge(w1, w1).is_zero and wedge(w2, w2).is_zero
    # at x2 = 1 the alpha-product formulas evaluate with sqrt(x2) = 1
    sym1, sym2 = split_product(w)
    assert w1 == sym1.eval_at(p)
    assert w2 == sym2.eval_at(p)


def test_split_float_mode():
    w = catalog.omega_f("x2")
    w1, w2 = split_product(w, point=[0, 2, 0, 0, 0, 0], mode="float")
    total = {}
    for d in (w1, w2):
        for k, v in d.items():
            total[k] = total.get(k, 0.0) + v
    expect = {(1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): 2.0}
    for k, v in expect.items():
        assert abs(total.get(k, 0.0) - v) < 1e-9


def test_split_wrong_type():
    with pytest.raises(WrongType):
        split_product(catalog.complex6())


def test_split_pointwise_irrational_scale():
    from plectic.errors import IrrationalScale

    w = catalog.omega_f("x2")
    with pytest.raises(IrrationalScale):
        split_product(w, point=[0, 2, 0, 0, 0, 0])  # sqrt(8) leaves Q
    # the float fallback succeeds at the same point
    w1, w2 = split_product(w, point=[0, 2, 0, 0, 0, 0], mode="float")
    assert w1 and w2


def test_verify_product_decomposition_three_parts():
    from plectic.classify import verify_product_decomposition

    c9 = chart(9)
    parts = [
        form(c9, 3, {(1, 2, 3): 1}),
        form(c9, 3, {(4, 5, 6): 1}),
        form(c9, 3, {(7, 8, 9): 1}),
    ]
    w = parts[0] + parts[1] + parts[2]
    assert verify_product_decomposition(w, parts)
    for p in parts:
        assert ext_d(p).is_zero
    bad = [parts[0] + parts[1], parts[2]]  # first candidate not decomposable
    assert not verify_product_decomposition(w, bad)
    assert not verify_product_decomposition(w, parts[:2])  # wrong sum


def test_split_tie_break_swaps_pair_only():
    w = catalog.omega_f("x2")
    w1, w2 = split_product(w)
    lead = sorted(set(w1.coeffs) | set(w2.coeffs))
    for key in lead:
        a = w1.coeffs.get(key)
        b = w2.coeffs.get(key)
        if (a is None) != (b is None) or (a is not None and not (a == b)):
            diff = (a or RationalExpr.const(6, 0)) - (b or RationalExpr.const(6, 0))
            assert diff.num.leading_coeff() > 0
            break


# -- almost-complex structures ----------------------------------------------------


def test_extract_acs_dim6():
    J = extract_acs(catalog.complex6())
    expected = {(1, 2): -1, (2, 1): 1, (3, 4): -1, (4, 3): 1, (5, 6): -1, (6, 5): 1}
    for i in range(1, 7):
        for j in range(1, 7):
            want = expected.get((i, j), 0)
            assert J.matrix[i - 1][j - 1] == want, (i, j)
    # defining compatibility identity holds for all pairs
    w = catalog.complex6()
    for i in range(1, 7):
        for j in range(1, 7):
            u = coordinate_vector(C6, i)
            v = coordinate_vector(C6, j)
            lhs = interior(J.apply(u), interior(v, w))
            rhs = interior(u, interior(J.apply(v), w))
            assert lhs == rhs


def test_extract_acs_dim8():
    w = catalog.complex_volume_re(4)
    J = extract_acs(w)
    c8 = w.chart
    minus_one = RationalExpr.const(8, -1)
    assert J.square() == EndField.identity(c8).scale(minus_one)
    for k in range(1, 5):
        assert J.matrix[2 * k - 1][2 * k - 2] == 1
        assert J.matrix[2 * k - 2][2 * k - 1] == -1


def test_extract_acs_wrong_type():
    with pytest.raises(WrongType):
        extract_acs(catalog.product6())


def test_nijenhuis_constant_j_vanishes():
    J = extract_acs(catalog.complex6())
    assert nijenhuis(J).integrable


def test_nijenhuis_nonintegrable_example():
    c4 = chart(4)
    x2 = parse_expression("x2", 4)
    rows = [
        [0, -1, x2, 0],
        [1, 0, 0, -x2],
        [0, 0, 0, -1],
        [0, 0, 1, 0],
    ]
    J = EndField.from_rows(c4, rows)
    rep = nijenhuis(J)
    assert not rep.integrable
    assert rep.values[(3, 4)] == multivec(c4, 1, {(1,): "x2"})
    # oracle: direct bracket computation
    cols = [J.column_field(i) for i in range(1, 5)]
    e3, e4 = coordinate_vector(c4, 3), coordinate_vector(c4, 4)
    manual = vf_bracket(cols[2], cols[3]) - J.apply(vf_bracket(cols[2], e4)) \
        - J.apply(vf_bracket(e3, cols[3])) - vf_bracket(e3, e4)
    assert manual == rep.values[(3, 4)]


def test_nijenhuis_requires_acs():
    with pytest.raises(NotAlmostComplex):
        nijenhuis(EndField.identity(chart(4)))


# -- involutivity ------------------------------------------------------------------


def test_involutive_coordinate_frame():
    c3 = chart(3)
    assert involutive([coordinate_vector(c3, 1), coordinate_vector(c3, 2)])


def test_involutive_witness():
    c3 = chart(3)
    X = coordinate_vector(c3, 1)
    Y = multivec(c3, 1, {(2,): 1, (3,): "x1"})
    rep = involutive([X, Y])
    assert not rep
    assert rep.witness_bracket == multivec(c3, 1, {(3,): 1})


def test_involutive_dependent_frame():
    c3 = chart(3)
    X = coordinate_vector(c3, 1)
    with pytest.raises(DependentFrame):
        involutive([X, X.scale(2)])


def test_tangent_type_kernel_frame_involutive():
    w = catalog.tangent6()
    J = hitchin_endomorphism(w, standard_volume(C6))
    from plectic.linalg import nullspace

    null = nullspace([list(r) for r in J.matrix])
    frame = [
        multivec(C6, 1, {(k + 1,): v[k] for k in range(6) if v[k]})
        for v in null
    ]
    assert len(frame) == 3
    assert set(k for f in frame for k in f.coeffs) == {(1,), (2,), (3,)}
    assert involutive(frame)


# -- flatness reports ---------------------------------------------------------------


def test_flatness_nonflat_family():
    rep = flatness_report(catalog.omega_f("x2"))
    assert rep.linear_type == PRODUCT
    assert rep.flat == NONFLAT
    assert rep.witness is not None and not rep.witness.is_zero


def test_flatness_flat_family():
    rep = flatness_report(catalog.omega_f(1))
    assert rep.linear_type == PRODUCT
    assert rep.flat == FLAT


def test_flatness_nonconstant_type():
    w = catalog.omega_f("x2", chart(6))  # x2 unconstrained: sign changes
    rep = flatness_report(w)
    assert rep.linear_type == NONCONSTANT
    assert len(rep.points) == 2


def test_flatness_normal_forms_flat():
    for w in (catalog.product6(), catalog.complex6(), catalog.tangent6()):
        rep = flatness_report(w)
        assert rep.flat == FLAT, rep


def test_flatness_perturbed_product_flips():
    # constant product form: both parts closed, flat
    w1, w2 = split_product(catalog.product6())
    assert ext_d(w1).is_zero and ext_d(w2).is_zero
    # perturbing the family coefficient makes the parts non-closed: the
    # verdict flips even though the total form stays closed (f = x2^2 keeps
    # the scale rational on an unconstrained chart)
    w = catalog.omega_f("x2^2", chart(6))
    assert ext_d(w).is_zero
    rep = flatness_report(w)
    assert rep.linear_type == PRODUCT
    assert rep.flat == NONFLAT
    p1, p2 = split_product(w)
    assert not ext_d(p1).is_zero and not ext_d(p2).is_zero


def test_flatness_undetermined_irrational_scale():
    # f = 2 gives lambda = 8: sqrt leaves the rationals, the report degrades
    # to Undetermined and records the float-sampled decomposability
    rep = flatness_report(catalog.omega_f(2))
    assert rep.linear_type == PRODUCT
    assert rep.flat == "Undetermined"
    assert any("1e-9" in note for note in rep.notes)


def test_sign_on_chart_monomial_rule():
    t = parse_expression("24*x2", 6)
    s = sign_on_chart(RationalExpr.const(6, 1) * t, HALF)
    assert s.sign == "+" and s.certified
    s2 = sign_on_chart(t, chart(6))
    assert s2.sign == "mixed" and len(s2.witnesses) == 2


# -- standard subspaces ---------------------------------------------------------------


def test_standard_subspace_multiphase():
    model = multiphase_forms(2, 1)
    ch = model.chart
    W = [
        coordinate_vector(ch, model.p_total_index),
        coordinate_vector(ch, model.p_index(1, 1)),
        coordinate_vector(ch, model.p_index(2, 1)),
    ]
    assert verify_standard_subspace(model.omega, W)


def test_standard_subspace_bad_pair():
    model = multiphase_forms(2, 1)
    ch = model.chart
    W = [
        coordinate_vector(ch, model.p_total_index),
        coordinate_vector(ch, model.q_index(1)),
        coordinate_vector(ch, model.p_index(1, 1)),
    ]
    rep = verify_standard_subspace(model.omega, W)
    assert not rep and not rep.pairwise_isotropic


def test_standard_subspace_volume_counterexample():
    c3 = chart(3)
    w = form(c3, 3, {(1, 2, 3): 1})
    frame = [coordinate_vector(c3, i) for i in (1, 2, 3)]
    assert not verify_standard_subspace(w, frame)


# -- symmetry fields of the half-space family ------------------------------------------


def test_translations_preserve_family():
    from plectic.exterior import lie_derivative

    w = catalog.omega_f("x2")
    for i in (1, 3, 4, 5, 6):
        assert lie_derivative(coordinate_vector(HALF, i), w).is_zero


def test_scaling_symmetry_from_weight_equations():
    # derive a weighted Euler field preserving omega^f (weights solve the
    # four weight equations); independent oracle for lie_derivative
    from plectic.exterior import lie_derivative

    w = catalog.omega_f("x2")
    weights = {1: Q(3, 2), 2: Q(1), 3: Q(0), 4: Q(-1, 2), 5: Q(-3, 2), 6: Q(-1)}
    coeffs = {}
    for i, wt in weights.items():
        if wt:
            coeffs[(i,)] = RationalExpr.variable(6, i) * RationalExpr.const(6, wt)
    E = multivec(HALF, 1, coeffs)
    assert lie_derivative(E, w).is_zero
