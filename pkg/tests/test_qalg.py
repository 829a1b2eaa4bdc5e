import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hypergpd import qalg
from hypergpd.qalg import (AlgebraMap, FPAlgebra, FPModule, Poly, parse_poly,
                           graded_window, groebner_basis, inverse_algebra_map,
                           is_unit_ideal, kaehler, localize, monomials_of_weight,
                           pushout_algebra, tensor_over_rationals)


def test_parse_and_print_roundtrip():
    vars = ("x", "y")
    p = parse_poly("2/3*x^2*y - 1", vars)
    assert p.terms == {(2, 1): Fraction(2, 3), (0, 0): Fraction(-1)}
    assert parse_poly(str(p), vars) == p
    assert parse_poly("0", vars).is_zero()
    assert parse_poly("-x + y^3", vars) == parse_poly("y^3 - x", vars)


def test_groebner_lex_example():
    # lex with y > x on {x^2 - 1, x*y - 1}: basis contains y - x and x^2 - 1
    vars = ("y", "x")
    rels = [parse_poly("x^2 - 1", vars), parse_poly("x*y - 1", vars)]
    gb = groebner_basis(rels, vars, order="lex")
    assert parse_poly("y - x", vars) in gb
    assert parse_poly("x^2 - 1", vars) in gb
    assert len(gb) == 2


def test_groebner_unit_and_empty():
    vars = ("x",)
    gb = groebner_basis([parse_poly("x", vars), parse_poly("x - 1", vars)], vars)
    assert len(gb) == 1 and gb[0].is_constant()
    assert groebner_basis([], vars) == []


def test_groebner_input_order_independent():
    vars = ("x", "y", "z")
    rels = [parse_poly("x*y - z", vars), parse_poly("y^2 - 1", vars),
            parse_poly("x + z^2", vars)]
    rng = random.Random(2)
    ref = groebner_basis(rels, vars)
    for _ in range(5):
        shuffled = rels[:]
        rng.shuffle(shuffled)
        assert groebner_basis(shuffled, vars) == ref


def test_ideal_membership():
    A = FPAlgebra(("x",), [parse_poly("x^2 - 1", ("x",))])
    # x^2 - 1 in (x - 1, x + 1)
    B = FPAlgebra(("x",), ["x - 1", "x + 1"])
    assert B.normal_form(parse_poly("x^2 - 1", ("x",))).is_zero()
    assert is_unit_ideal(B)  # (x-1, x+1) contains 2
    C = FPAlgebra(("x",), ["x"])
    assert not is_unit_ideal(C)
    assert not A.is_zero_ring()


def test_normal_forms_canonical():
    A = FPAlgebra(("x", "y"), ["x^2 + y^2 - 1"])
    rng = random.Random(4)
    for _ in range(10):
        f = Poly(A.vars, {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-3, 3)
                          for _ in range(3)})
        g = f + A.relations[0].mul_term((rng.randint(0, 2), 0), rng.randint(-2, 2))
        assert A.normal_form(f) == A.normal_form(g)
        assert A.elements_equal(f, g)


def test_pushout_polynomial_rings():
    A = FPAlgebra.polynomial("x")
    B = FPAlgebra.polynomial("y")
    C, ia, ib = tensor_over_rationals(A, B)
    assert set(C.vars) == {"x", "y"}
    assert not C.relations

    # A tensor_A A = A (mutual normal-form maps)
    idA = AlgebraMap.identity(A)
    D, ja, jb = pushout_algebra(idA, idA)
    # x and x' are identified
    assert D.elements_equal(ja.images["x"], jb.images["x"])


def test_pushout_localizations():
    A = FPAlgebra.polynomial("x")
    L1, i1, u = localize(A, A.var("x"), "u")
    L2, i2, v = localize(A, A.parse("x - 1"), "v")
    C, _, _ = pushout_algebra(i1, i2)
    # QQ[x,u,v]/(u x - 1, v(x-1) - 1) up to renaming
    assert len(C.vars) == 4  # x, u, x', v with x = x'
    one = C.one()
    gb = C.groebner()
    assert not C.is_zero_ring()
    # u*x = 1 and v*(x-1) = 1 hold
    x = C.var("x")
    uu = C.var("u")
    assert C.elements_equal(uu * x, one)


def test_localize_twice_vs_product():
    A = FPAlgebra.polynomial("x")
    f = A.var("x")
    g = A.parse("x - 1")
    L1, i1, _ = localize(A, f, "u")
    L12, i12, _ = localize(L1, i1.apply(g), "v")
    Lfg, ifg, w = localize(A, f * g, "w")
    phi_images = {"x": Lfg.var("x"),
                  "u": Lfg.parse("w*x - w") * Lfg.one(),  # 1/x = w(x-1)
                  "v": Lfg.parse("w*x")}                  # 1/(x-1) = wx
    phi = AlgebraMap(L12, Lfg, phi_images)
    psi = inverse_algebra_map(phi)
    assert psi is not None


def test_localize_at_one():
    A = FPAlgebra.polynomial("x")
    L, incl, _ = localize(A, A.one(), "t")
    psi = inverse_algebra_map(incl)
    assert psi is not None


def test_kaehler_circle():
    A = FPAlgebra(("x", "y"), ["x^2 + y^2 - 1"])
    R = FPAlgebra.rationals()
    phi = AlgebraMap(R, A, {})
    M = kaehler(phi)
    assert M.gens == ("dx", "dy")
    assert len(M.relations) == 1
    assert M.relations[0] == (A.parse("2*x"), A.parse("2*y"))
    assert not M.is_zero()


def test_kaehler_affine_line_free():
    A = FPAlgebra.polynomial("x")
    phi = AlgebraMap(FPAlgebra.rationals(), A, {})
    M = kaehler(phi)
    assert M.gens == ("dx",)
    assert not M.is_zero()


def test_kaehler_localization_vanishes():
    A = FPAlgebra.polynomial("x")
    L, incl, _ = localize(A, A.var("x"), "y")
    M = kaehler(incl)
    assert M.is_zero()


def test_kaehler_right_exactness_ranks():
    # R -> A -> B with B = A localized: Omega_{B/R} surjects onto Omega_{B/A} = 0
    R = FPAlgebra.rationals()
    A = FPAlgebra.polynomial("x", weights={"x": 1})
    L, incl, inv = localize(A, A.var("x"), "y")
    omega_BR = kaehler(AlgebraMap(R, L, {}))
    omega_BA = kaehler(incl)
    w_BR = graded_window(omega_BR, (0, 1))
    assert omega_BA.is_zero()
    # the cokernel of Omega_{A/R} (x) B -> Omega_{B/R} is Omega_{B/A}:
    # in each weight the dx-column spans, so coker slices vanish
    for w, sl in w_BR.items():
        # relations: y*dx + x*dy (from xy-1), images of dx generate
        assert sl.dimension <= 1


def test_monomials_of_weight():
    A = FPAlgebra(("s", "t"), ["s*t - 1"], weights={"s": 1, "t": -1})
    for w in range(-2, 3):
        ms = monomials_of_weight(A, w)
        assert len(ms) == 1
    B = FPAlgebra.polynomial("s", weights={"s": 1})
    assert len(monomials_of_weight(B, 3)) == 1
    assert monomials_of_weight(B, -1) == []
    with pytest.raises(qalg.WindowOverflowError):
        C = FPAlgebra(("x", "y"), [], weights={"x": 1, "y": -1})
        monomials_of_weight(C, 0)


def test_graded_window_dimensions():
    # QQ[s, s^-1], window [-2, 2]: dimension 5
    A = FPAlgebra(("s", "si"), ["s*si - 1"], weights={"s": 1, "si": -1})
    M = FPModule(A, ("e",), (), gen_weights=(0,))
    sl = graded_window(M, (-2, 2))
    assert sum(s.dimension for s in sl.values()) == 5
    # QQ[s], window [0, 3]: dimension 4
    B = FPAlgebra.polynomial("s", weights={"s": 1})
    MB = FPModule(B, ("e",), (), gen_weights=(0,))
    assert sum(s.dimension for s in graded_window(MB, (0, 3)).values()) == 4
    # free rank 2 with generator weights 0 and -2, window [0,0]: dimension 2
    M2 = FPModule(B, ("a", "b"), (), gen_weights=(0, -2))
    assert graded_window(M2, (0, 0))[0].dimension == 2


def test_generic_rank_laurent():
    A = FPAlgebra(("u", "v"), ["u*v - 1"], weights={"u": 1, "v": -1})
    u = A.var("u")
    one = A.one()
    zero = A.zero()
    m = [[u, one], [one, A.var("v")]]
    # det = u*v - 1 = 0 in A: rank 1
    assert qalg.generic_rank(A, m) == 1
    m2 = [[u, one], [one, zero]]
    assert qalg.generic_rank(A, m2) == 2
    assert qalg.generic_rank(A, [[zero]]) == 0


def test_inverse_algebra_map_failure():
    A = FPAlgebra.polynomial("x")
    B = FPAlgebra.polynomial("y")
    phi = AlgebraMap(A, B, {"x": B.parse("y^2")})
    assert inverse_algebra_map(phi) is None


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2),
                          st.integers(-3, 3)), min_size=1, max_size=4))
@settings(max_examples=30, deadline=None)
def test_poly_ring_axioms(data):
    vars = ("x", "y")
    p = Poly(vars, {(a, b): c for a, b, c in data})
    q = Poly(vars, {(b, a): c for a, b, c in data})
    assert (p + q) - q == p
    assert p * q == q * p
    assert p * (q + q) == p * q + p * q
