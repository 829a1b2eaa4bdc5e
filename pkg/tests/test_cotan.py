from fractions import Fraction

import pytest

from hypergpd import cotan, dkab, hypaff, simpset as ss
from hypergpd.cotan import (CotangentComplex, cotangent_shift_check, ext_dims,
                            generic_homology_dims, module_shape_tensor,
                            reduced_cotangent, shape_pairs, sphere_tensor,
                            window_homology_dims)
from hypergpd.hypaff import (bgm_certificates, builtin_bgm, builtin_p1,
                             constant_stack, p1_certificates, structure_module,
                             twisting_module_p1)
from hypergpd.qalg import FPAlgebra
from hypergpd.simpset import InsufficientDataError


def test_module_shape_tensor_ranks():
    M = dkab.constant_module("QQ", 1, 2)
    K = ss.delta(1)
    T = module_shape_tensor(M, K)
    assert T.ranks == (2, 3, 4)  # |Delta^1_n| = n + 2
    L = ss.horn(1, 0)
    T2 = module_shape_tensor(M, K, L)
    assert T2.ranks[0] == 1


def test_module_shape_tensor_sphere_shift():
    # normalize of M (x) (Delta^m/dDelta^m) is M shifted by m, constant M
    for m in (1, 2):
        M = dkab.constant_module("ZZ", 1, m + 2)
        T = module_shape_tensor(M, ss.delta(m), ss.boundary(m))
        nc = dkab.normalize(T)
        expect = [0] * (m + 2 + 1)
        expect[m] = 1
        assert list(nc.complex.ranks) == expect[:m + 3]


def test_module_shape_tensor_point_composition():
    M = dkab.constant_module("QQ", 2, 2)
    K = ss.delta(1)
    T1 = module_shape_tensor(M, K)
    T2 = module_shape_tensor(T1, ss.delta(0))
    assert T1.ranks == T2.ranks


def test_shape_pairs_counts():
    # pairs for Delta^0 x Delta^1 with no quotient: the prism cells of a segment
    ps = shape_pairs(0, 1, None)
    assert len(ps) == 3  # two vertices and one edge
    # horn quotient on Delta^1-shapes at level 0 kills the 0-vertex classes
    ps2 = shape_pairs(1, 0, "horn")
    ks = {p[0] for p in ps2}
    assert (0,) not in ks and (1,) in ks and (0, 1) in ks


def _affine_stack(weights=True):
    A = FPAlgebra.polynomial("x", weights={"x": 1} if weights else None)
    return constant_stack(A, up_to=3), {(0, 0): hypaff.CoverCertificate(
        "smooth_standard", {"witness": [{"minor_vars": [], "inverse": "1"}]})}


def test_affine_cotangent_is_omega():
    X, certs = _affine_stack()
    Lc = reduced_cotangent(X, 0, certs, levels=2)
    for n in range(3):
        dims = generic_homology_dims(Lc, n, 0)
        assert dims[0] == 1  # Omega of QQ[x] is free of rank 1


def test_affine_shift_check():
    X, certs = _affine_stack()
    rep = cotangent_shift_check(X, 0, certs, window=(0, 3), levels=2)
    assert rep.verdict


def test_missing_certificates():
    X, _ = _affine_stack()
    with pytest.raises(InsufficientDataError):
        reduced_cotangent(X, 0, None)
    with pytest.raises(InsufficientDataError):
        reduced_cotangent(X, 1, {}, levels=2)


def test_bgm_cotangent_homology():
    X = builtin_bgm(3)
    Lc = reduced_cotangent(X, 1, bgm_certificates(), levels=2)
    for n in (1, 2):
        dims = generic_homology_dims(Lc, n, 0, positions=(0, 1))
        assert dims[0] == 0, f"H_0 at level {n}: {dims}"
        assert dims[1] == 1, f"H_-1 at level {n}: {dims}"


def test_bgm_shift_check():
    X = builtin_bgm(4)
    rep = cotangent_shift_check(X, 1, bgm_certificates(), levels=2)
    assert rep.verdict, rep.per_level


def test_discrete_nerve_cotangent_vanishes():
    G = ss.cyclic_group(2)
    X = hypaff.discrete_groupoid_stack(G, up_to=4)
    certs = {(m, k): hypaff.CoverCertificate("iso", {})
             for m in (0, 1) for k in range(m + 1)}
    Lc = reduced_cotangent(X, 1, certs, levels=2)
    for n in range(3):
        for c in range(len(X.level(n))):
            dims = generic_homology_dims(Lc, n, c)
            assert all(v == 0 for v in dims.values())
    rep = cotangent_shift_check(X, 1, certs, levels=2)
    assert rep.verdict


def test_p1_cotangent_charts():
    X = builtin_p1(3)
    Lc = reduced_cotangent(X, 1, p1_certificates(), levels=1)
    # on the pure chart components of level 0: H_0 = Omega(chart) (one
    # weight-(-1)-ish slice per weight), H_{-1} = 0
    dims = window_homology_dims(Lc, 0, 0, (0, 2))
    # position 0 is H_0, position 1 is H_{-1}
    # chart QQ[s]: Omega free rank 1 on ds (weight 1): slices at w>=1 are 1-dim
    assert dims[(0, 1)] == 1 and dims[(0, 2)] == 1
    assert dims[(0, 0)] == 0
    assert all(dims[(1, w)] == 0 for w in range(0, 3))


def test_affine_ext():
    X, certs = _affine_stack()
    Lc = reduced_cotangent(X, 0, certs, levels=2)
    O = structure_module(X)
    dims = ext_dims(Lc, O, (0, 2), (0, 3), levels_used=1)
    # Hom(Omega, O) within the window: rank 1 x window dims 0..3 of QQ[x]
    assert dims[0] == 4
    assert dims[1] == 0 and dims[2] == 0


def test_ext_zero_module():
    X, certs = _affine_stack()
    Lc = reduced_cotangent(X, 0, certs, levels=2)
    dims = ext_dims(Lc, None, (0, 2), (0, 3))
    assert dims == {0: 0, 1: 0, 2: 0}


def test_bgm_ext():
    X = builtin_bgm(3)
    Lc = reduced_cotangent(X, 1, bgm_certificates(), levels=2)
    O = structure_module(X)
    dims = ext_dims(Lc, O, (0, 2), (0, 2), levels_used=2)
    assert dims[0] == 0
    assert dims[1] == 1
    assert dims[2] == 0
