"""Simplicial and cosimplicial modules over ZZ or QQ, both Dold-Kan functors,
exact homology, conormalization, product total complexes and shuffle algebras.

All maps are dense exact matrices (`linalg.Mat`); over ZZ homology is computed
by Smith normal form, over QQ by Gaussian elimination.  Normalization is the
intersection-of-kernels complex (kernels of d_i for i > 0, differential d_0);
conormalization intersects the kernels of the codegeneracies and uses the
alternating coface sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import Mat, integer_kernel_basis, mat_from_cols, smith_invariants
from . import simpset as ss


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------


class ChainComplex:
    """Non-negatively graded chain complex of free modules, d_n: C_n -> C_{n-1}."""

    def __init__(self, ring: str, ranks: Sequence[int], diffs: dict[int, Mat],
                 validate: bool = True):
        assert ring in ("ZZ", "QQ")
        self.ring = ring
        self.ranks = tuple(ranks)
        self.diffs = dict(diffs)
        if validate:
            self.validate()

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def diff(self, n: int) -> Mat:
        if n in self.diffs:
            return self.diffs[n]
        return Mat.zeros(self.rank(n - 1), self.rank(n))

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def validate(self):
        for n in range(1, len(self.ranks)):
            d = self.diff(n)
            assert d.rows == self.rank(n - 1) and d.cols == self.rank(n)
            if self.ring == "ZZ":
                assert d.is_integral()
            if n >= 2 and not (self.diff(n - 1) * d).is_zero():
                raise ValueError(f"d o d != 0 at degree {n}")

    def __repr__(self):
        return f"ChainComplex({self.ring}, ranks={self.ranks})"


class CochainComplex:
    """Non-negatively graded cochain complex, d^n: C^n -> C^{n+1}."""

    def __init__(self, ring: str, ranks: Sequence[int], diffs: dict[int, Mat],
                 validate: bool = True):
        self.ring = ring
        self.ranks = tuple(ranks)
        self.diffs = dict(diffs)
        if validate:
            for n in range(len(self.ranks) - 1):
                d = self.diff(n)
                assert d.rows == self.rank(n + 1) and d.cols == self.rank(n)
                if n >= 1 and not (d * self.diff(n - 1)).is_zero():
                    raise ValueError(f"d o d != 0 at degree {n}")

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def diff(self, n: int) -> Mat:
        if n in self.diffs:
            return self.diffs[n]
        return Mat.zeros(self.rank(n + 1), self.rank(n))

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def cohomology_dims(self, up_to: Optional[int] = None) -> tuple[int, ...]:
        """Cohomology dimensions over the fraction field."""
        top = self.top if up_to is None else up_to
        out = []
        for n in range(top + 1):
            incoming = self.diff(n - 1).rank() if n >= 1 else 0
            out.append(self.rank(n) - self.diff(n).rank() - incoming)
        return tuple(out)

    def __repr__(self):
        return f"CochainComplex({self.ring}, ranks={self.ranks})"


def homology(C: ChainComplex, up_to: Optional[int] = None) -> list[tuple[int, tuple[int, ...]]]:
    """Per-degree homology as (free rank, torsion invariants > 1).

    Over QQ the torsion part is always empty.  Degrees above the stored top
    are not reported; the top degree itself is computed with a zero incoming
    boundary, which is only meaningful if the complex genuinely stops there.
    """
    top = C.top if up_to is None else up_to
    out = []
    for n in range(top + 1):
        rk_out = C.diff(n).rank() if n >= 1 else 0
        rk_in = C.diff(n + 1).rank()
        free = C.rank(n) - rk_out - rk_in
        torsion: tuple[int, ...] = ()
        if C.ring == "ZZ":
            inv = smith_invariants(C.diff(n + 1))
            torsion = tuple(d for d in inv if d > 1)
        out.append((free, torsion))
    return out


def shift_complex(C: ChainComplex, m: int) -> ChainComplex:
    """C[m]: degree n of the result is degree n-m of C (m >= 0)."""
    ranks = (0,) * m + C.ranks
    diffs = {n + m: d for n, d in C.diffs.items()}
    return ChainComplex(C.ring, ranks, diffs, validate=False)


# ---------------------------------------------------------------------------
# simplicial modules
# ---------------------------------------------------------------------------


class SimplicialModule:
    """Levelwise free module with face/degeneracy matrices.

    ``face[(n, i)]`` maps level n to level n-1, ``degen[(n, i)]`` maps level
    n to level n+1; the simplicial identities are asserted as matrix
    equations on construction.
    """

    def __init__(self, ring: str, ranks: Sequence[int],
                 face: dict[tuple[int, int], Mat],
                 degen: dict[tuple[int, int], Mat],
                 validate: bool = True):
        assert ring in ("ZZ", "QQ")
        self.ring = ring
        self.ranks = tuple(ranks)
        self.face = dict(face)
        self.degen = dict(degen)
        if validate:
            self.validate()

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def d(self, n: int, i: int) -> Mat:
        return self.face[(n, i)]

    def s(self, n: int, i: int) -> Mat:
        return self.degen[(n, i)]

    def validate(self):
        N = self.top
        for n in range(1, N + 1):
            for i in range(n + 1):
                m = self.d(n, i)
                assert m.rows == self.rank(n - 1) and m.cols == self.rank(n)
        for n in range(N):
            for i in range(n + 1):
                m = self.s(n, i)
                assert m.rows == self.rank(n + 1) and m.cols == self.rank(n)
        for n in range(2, N + 1):
            for j in range(1, n + 1):
                for i in range(j):
                    if self.d(n - 1, i) * self.d(n, j) != self.d(n - 1, j - 1) * self.d(n, i):
                        raise ValueError(f"d_i d_j identity fails at level {n}")
        for n in range(N - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if self.s(n + 1, j + 1) * self.s(n, i) != self.s(n + 1, i) * self.s(n, j):
                        raise ValueError(f"s_i s_j identity fails at level {n}")
        for n in range(N):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self.d(n + 1, i) * self.s(n, j)
                    if i < j:
                        rhs = self.s(n - 1, j - 1) * self.d(n, i)
                    elif i in (j, j + 1):
                        rhs = Mat.identity(self.rank(n))
                    else:
                        rhs = self.s(n - 1, j) * self.d(n, i - 1)
                    if lhs != rhs:
                        raise ValueError(f"d_i s_j identity fails at level {n}")

    def __repr__(self):
        return f"SimplicialModule({self.ring}, ranks={self.ranks})"


def constant_module(ring: str, rank: int, up_to: int) -> SimplicialModule:
    ident = Mat.identity(rank)
    face = {(n, i): ident for n in range(1, up_to + 1) for i in range(n + 1)}
    degen = {(n, i): ident for n in range(up_to) for i in range(n + 1)}
    return SimplicialModule(ring, [rank] * (up_to + 1), face, degen, validate=False)


def _kernel_basis(ring: str, A: Mat) -> list[tuple]:
    if ring == "ZZ":
        return integer_kernel_basis(A)
    return A.nullspace()


@dataclass
class NormalizedComplex:
    complex: ChainComplex
    inclusions: list[Mat]  # basis of N_n as columns inside level n


def normalize(A: SimplicialModule) -> NormalizedComplex:
    """The intersection-of-kernels complex: N_n = ker d_1 cap ... cap ker d_n,
    with differential the restriction of d_0."""
    incls: list[Mat] = []
    ranks: list[int] = []
    for n in range(A.top + 1):
        if n == 0:
            incl = Mat.identity(A.rank(0))
        else:
            stacked = A.d(n, 1)
            for i in range(2, n + 1):
                stacked = stacked.vstack(A.d(n, i))
            incl = mat_from_cols(_kernel_basis(A.ring, stacked), A.rank(n))
        incls.append(incl)
        ranks.append(incl.cols)
    diffs: dict[int, Mat] = {}
    for n in range(1, A.top + 1):
        img = A.d(n, 0) * incls[n]
        cols = []
        for j in range(img.cols):
            sol = incls[n - 1].solve(img.col(j))
            if sol is None:
                raise ValueError("d_0 does not preserve the normalized part")
            cols.append(sol)
        d = mat_from_cols(cols, ranks[n - 1])
        if A.ring == "ZZ" and not d.is_integral():
            raise ValueError("normalized differential not integral")
        diffs[n] = d
    return NormalizedComplex(ChainComplex(A.ring, ranks, diffs), incls)


def moore_complex(A: SimplicialModule) -> ChainComplex:
    """The unnormalized chain complex with alternating-sum differential."""
    diffs = {}
    for n in range(1, A.top + 1):
        d = A.d(n, 0)
        for i in range(1, n + 1):
            d = d + A.d(n, i).scale((-1) ** i)
        diffs[n] = d
    return ChainComplex(A.ring, list(A.ranks), diffs, validate=False)


def homotopy_groups(A: SimplicialModule, up_to: Optional[int] = None):
    """pi_* computed from the unnormalized Moore complex (independent route)."""
    return homology(moore_complex(A), up_to=up_to)


# -- Dold-Kan inverse ---------------------------------------------------------


def _monotone_surjections(n: int, k: int) -> list[tuple[int, ...]]:
    out = []
    for vals in itertools.combinations_with_replacement(range(k + 1), n + 1):
        if set(vals) == set(range(k + 1)):
            out.append(vals)
    return out


def _epi_mono_factor(values: tuple[int, ...], dst: int):
    """Factor a monotone map as surjection followed by injection."""
    image = sorted(set(values))
    epi = tuple(image.index(v) for v in values)
    mono = tuple(image)
    return epi, mono  # epi: [len-1] ->> [|image|-1], mono into [dst]


def denormalize(C: ChainComplex, up_to: int) -> SimplicialModule:
    """Dold-Kan inverse: level n is the sum of C_k over surjections [n] ->> [k]."""
    return denormalize_with_layout(C, up_to)[0]


def denormalize_with_layout(C: ChainComplex, up_to: int):
    """Dold-Kan inverse together with the summand layout.

    Level n is the sum of C_k over surjections [n] ->> [k]; the operator
    action sends the summand eta along theta to the summand of the epi part
    of eta o theta, the mono part acting on C by the identity, by the
    differential when it is the 0th coface, and by zero otherwise.  Returns
    (module, summands per level, offset function).
    """
    if up_to < 0:
        raise ValueError("up_to must be >= 0")
    summands: list[list[tuple[int, ...]]] = []
    for n in range(up_to + 1):
        etas = []
        for k in range(min(n, C.top) + 1):
            etas.extend(_monotone_surjections(n, k))
        etas.sort(key=lambda e: (max(e), e))
        summands.append(etas)

    def level_rank(n):
        return sum(C.rank(max(e)) for e in summands[n])

    def offset(n, eta):
        off = 0
        for e in summands[n]:
            if e == eta:
                return off
            off += C.rank(max(e))
        raise KeyError(eta)

    def mono_action(mono: tuple[int, ...], k_src: int) -> Optional[Mat]:
        """The map C_{k_src} -> C_{len(mono)-1} induced by the injection."""
        k_dst = len(mono) - 1
        if mono == tuple(range(k_src + 1)):
            return Mat.identity(C.rank(k_src))
        if k_dst == k_src - 1 and mono == tuple(range(1, k_src + 1)):
            return C.diff(k_src)
        return None

    def operator_matrix(n_src: int, theta_vals: tuple[int, ...], n_dst: int) -> Mat:
        """Action on levels induced by theta: [n_dst] -> [n_src]."""
        M = [[Fraction(0)] * level_rank(n_src) for _ in range(level_rank(n_dst))]
        for eta in summands[n_src]:
            k = max(eta)
            comp = tuple(eta[v] for v in theta_vals)
            epi, mono = _epi_mono_factor(comp, k)
            act = mono_action(mono, k)
            if act is None:
                continue
            r0 = offset(n_dst, epi)
            c0 = offset(n_src, eta)
            for r in range(act.rows):
                for c in range(act.cols):
                    M[r0 + r][c0 + c] = act[r, c]
        return Mat(level_rank(n_dst), level_rank(n_src), M)

    face = {}
    degen = {}
    for n in range(1, up_to + 1):
        for i in range(n + 1):
            theta = tuple(v for v in range(n + 1) if v != i)
            face[(n, i)] = operator_matrix(n, theta, n - 1)
    for n in range(up_to):
        for i in range(n + 1):
            theta = tuple(v if v <= i else v - 1 for v in range(n + 2))
            degen[(n, i)] = operator_matrix(n, theta, n + 1)
    ring = C.ring
    module = SimplicialModule(ring, [level_rank(n) for n in range(up_to + 1)],
                              face, degen)
    return module, summands, offset


def dk_roundtrip_iso(C: ChainComplex, up_to: Optional[int] = None):
    """normalize(denormalize(C)) together with the projection isomorphism.

    Returns (normalized complex, list of matrices N_n -> C_n) where each
    matrix is invertible and conjugates the differentials on the nose.
    """
    top = C.top if up_to is None else up_to
    A, summands, offset = denormalize_with_layout(C, top)
    nc = normalize(A)
    projs = []
    for n in range(top + 1):
        incl = nc.inclusions[n]
        rk = C.rank(n)
        if n <= C.top and rk:
            off = offset(n, tuple(range(n + 1)))
        else:
            off = 0
        proj = Mat(rk, incl.rows,
                   [[Fraction(1 if c == off + r else 0) for c in range(incl.rows)]
                    for r in range(rk)])
        projs.append(proj * incl)
    return nc, projs


def dk_hypergroupoid_check(A: SimplicialModule, n: int) -> bool:
    """True when the normalized complex vanishes in degrees above n."""
    nc = normalize(A)
    return all(nc.complex.rank(m) == 0 for m in range(n + 1, A.top + 1))


def underlying_mod2_sset(A: SimplicialModule) -> ss.FinSSet:
    """The simplicial set of the mod-2 reduction (levels are F_2 vectors)."""
    assert A.ring == "ZZ"
    levels = []
    for nlev in range(A.top + 1):
        levels.append([tuple(bits) for bits in
                       itertools.product((0, 1), repeat=A.rank(nlev))])

    def face_fn(nlev, i, el):
        vec = A.d(nlev, i).apply(el)
        return tuple(int(x) % 2 for x in vec)

    def degen_fn(nlev, i, el):
        vec = A.s(nlev, i).apply(el)
        return tuple(int(x) % 2 for x in vec)

    fs, _ = ss.from_levelwise(levels, face_fn, degen_fn, prefix="m2")
    return fs


def linearize_sset(X: ss.FinSSet, up_to: int, ring: str = "ZZ") -> SimplicialModule:
    """Free linearization: level n is the free module on all n-simplices."""
    bases = [X.simplices(n) for n in range(up_to + 1)]
    index = [{x: i for i, x in enumerate(b)} for b in bases]

    def op_matrix(n_src, n_dst, fn):
        M = [[Fraction(0)] * len(bases[n_src]) for _ in range(len(bases[n_dst]))]
        for c, x in enumerate(bases[n_src]):
            M[index[n_dst][fn(x)]][c] = Fraction(1)
        return Mat(len(bases[n_dst]), len(bases[n_src]), M)

    face = {(n, i): op_matrix(n, n - 1, lambda x, i=i: X.face(x, i))
            for n in range(1, up_to + 1) for i in range(n + 1)}
    degen = {(n, i): op_matrix(n, n + 1, lambda x, i=i: X.degeneracy(x, i))
             for n in range(up_to) for i in range(n + 1)}
    return SimplicialModule(ring, [len(b) for b in bases], face, degen, validate=False)


# ---------------------------------------------------------------------------
# cosimplicial modules
# ---------------------------------------------------------------------------


class CosimplicialModule:
    """Levelwise free module with coface/codegeneracy matrices.

    ``coface[(n, i)]`` maps level n-1 to level n (i = 0..n); ``codegen[(n, i)]``
    maps level n+1 to level n (i = 0..n).
    """

    def __init__(self, ring: str, ranks: Sequence[int],
                 coface: dict[tuple[int, int], Mat],
                 codegen: dict[tuple[int, int], Mat],
                 validate: bool = True):
        self.ring = ring
        self.ranks = tuple(ranks)
        self.coface = dict(coface)
        self.codegen = dict(codegen)
        if validate:
            self.validate()

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def cf(self, n: int, i: int) -> Mat:
        return self.coface[(n, i)]

    def cd(self, n: int, i: int) -> Mat:
        return self.codegen[(n, i)]

    def validate(self):
        N = self.top
        for n in range(1, N + 1):
            for i in range(n + 1):
                m = self.cf(n, i)
                assert m.rows == self.rank(n) and m.cols == self.rank(n - 1)
        for n in range(N):
            for i in range(n + 1):
                m = self.cd(n, i)
                assert m.rows == self.rank(n) and m.cols == self.rank(n + 1)
        for n in range(2, N + 1):
            for j in range(n + 1):
                for i in range(j):
                    if self.cf(n, j) * self.cf(n - 1, i) != self.cf(n, i) * self.cf(n - 1, j - 1):
                        raise ValueError(f"coface identity fails at level {n}")


def conormalize(A: CosimplicialModule) -> CochainComplex:
    """N_c(A)^n = intersection of ker(codegeneracies), differential the
    alternating coface sum, expressed in the kernel bases."""
    incls = []
    ranks = []
    for n in range(A.top + 1):
        if n == 0:
            incl = Mat.identity(A.rank(0))
        else:
            stacked = A.cd(n - 1, 0)
            for i in range(1, n):
                stacked = stacked.vstack(A.cd(n - 1, i))
            incl = mat_from_cols(_kernel_basis(A.ring, stacked), A.rank(n))
        incls.append(incl)
        ranks.append(incl.cols)
    diffs = {}
    for n in range(A.top):
        d = A.cf(n + 1, 0)
        for i in range(1, n + 2):
            d = d + A.cf(n + 1, i).scale((-1) ** i)
        img = d * incls[n]
        cols = []
        for j in range(img.cols):
            sol = incls[n + 1].solve(img.col(j))
            if sol is None:
                raise ValueError("alternating sum does not preserve conormalization")
            cols.append(sol)
        diffs[n] = mat_from_cols(cols, ranks[n + 1])
    return CochainComplex(A.ring, ranks, diffs)


def unnormalized_cochain(A: CosimplicialModule) -> CochainComplex:
    diffs = {}
    for n in range(A.top):
        d = A.cf(n + 1, 0)
        for i in range(1, n + 2):
            d = d + A.cf(n + 1, i).scale((-1) ** i)
        diffs[n] = d
    return CochainComplex(A.ring, list(A.ranks), diffs, validate=False)


# ---------------------------------------------------------------------------
# cosimplicial chain complexes and Tot
# ---------------------------------------------------------------------------


class CosimplicialChainComplex:
    """For each cosimplicial degree i <= D a chain complex, with coface and
    codegeneracy chain maps between them."""

    def __init__(self, ring: str, complexes: Sequence[ChainComplex],
                 cofaces: dict[tuple[int, int], dict[int, Mat]],
                 codegens: dict[tuple[int, int], dict[int, Mat]],
                 validate: bool = True):
        self.ring = ring
        self.complexes = list(complexes)
        self.cofaces = {k: dict(v) for k, v in cofaces.items()}
        self.codegens = {k: dict(v) for k, v in codegens.items()}
        if validate:
            self.validate()

    @property
    def cotop(self) -> int:
        return len(self.complexes) - 1

    def cf(self, i_level: int, i: int, deg: int) -> Mat:
        m = self.cofaces.get((i_level, i), {}).get(deg)
        if m is None:
            return Mat.zeros(self.complexes[i_level].rank(deg),
                             self.complexes[i_level - 1].rank(deg))
        return m

    def validate(self):
        for (lev, i), comps in self.cofaces.items():
            src = self.complexes[lev - 1]
            dst = self.complexes[lev]
            for deg in range(max(src.top, dst.top) + 1):
                m = self.cf(lev, i, deg)
                assert m.rows == dst.rank(deg) and m.cols == src.rank(deg)
                if deg >= 1:
                    lhs = dst.diff(deg) * self.cf(lev, i, deg)
                    rhs = self.cf(lev, i, deg - 1) * src.diff(deg)
                    if lhs != rhs:
                        raise ValueError("coface is not a chain map")


@dataclass
class _SliceBasis:
    # degree n of Tot: summands (cosim degree i, chain degree n+i)
    pieces: list[tuple[int, int, int]]  # (i, chain degree, rank)

    @property
    def total(self):
        return sum(p[2] for p in self.pieces)


def conormalize_cosimplicial_complex(V: CosimplicialChainComplex):
    """Conormalize each chain degree across the cosimplicial direction.

    Returns (list of chain complexes N^i, coface-differential chain maps
    N^i -> N^{i+1} given by the alternating sum).
    """
    ring = V.ring
    maxdeg = max(c.top for c in V.complexes)
    incls: list[dict[int, Mat]] = []
    for i, C in enumerate(V.complexes):
        table = {}
        for deg in range(maxdeg + 1):
            if i == 0:
                table[deg] = Mat.identity(C.rank(deg))
            else:
                rows = []
                for j in range(i):
                    rows.append(V.codegens.get((i - 1, j), {}).get(
                        deg, Mat.zeros(V.complexes[i - 1].rank(deg), C.rank(deg))))
                stacked = rows[0]
                for r in rows[1:]:
                    stacked = stacked.vstack(r)
                table[deg] = mat_from_cols(_kernel_basis(ring, stacked), C.rank(deg))
        incls.append(table)
    normd: list[ChainComplex] = []
    for i, C in enumerate(V.complexes):
        ranks = [incls[i][deg].cols for deg in range(maxdeg + 1)]
        diffs = {}
        for deg in range(1, maxdeg + 1):
            img = C.diff(deg) * incls[i][deg]
            cols = [incls[i][deg - 1].solve(img.col(j)) for j in range(img.cols)]
            if any(c is None for c in cols):
                raise ValueError("differential does not preserve conormalization")
            diffs[deg] = mat_from_cols(cols, ranks[deg - 1])
        normd.append(ChainComplex(ring, ranks, diffs, validate=False))
    comaps: list[dict[int, Mat]] = []
    for i in range(1, len(V.complexes)):
        table = {}
        for deg in range(maxdeg + 1):
            d = Mat.zeros(V.complexes[i].rank(deg), V.complexes[i - 1].rank(deg))
            for k in range(i + 1):
                d = d + V.cf(i, k, deg).scale((-1) ** k)
            img = d * incls[i - 1][deg]
            cols = [incls[i][deg].solve(img.col(j)) for j in range(img.cols)]
            if any(c is None for c in cols):
                raise ValueError("alternating sum leaves conormalization")
            table[deg] = mat_from_cols(cols, normd[i].rank(deg))
        comaps.append(table)
    return normd, comaps


def tot_pi(V: CosimplicialChainComplex, window: tuple[int, int]) -> "TotComplex":
    """Product total complex of the conormalized double complex.

    Degree n collects the pieces N^i_{n+i}; the differential is
    d_chain + (-1)^{chain degree} d_cochain.  The window (lo, hi) selects
    the total degrees materialized.
    """
    normd, comaps = conormalize_cosimplicial_complex(V)
    lo, hi = window
    bases: dict[int, _SliceBasis] = {}
    for n in range(lo, hi + 1):
        pieces = []
        for i in range(len(normd)):
            r = normd[i].rank(n + i)
            pieces.append((i, n + i, r))
        bases[n] = _SliceBasis(pieces)

    def offset(n, i):
        off = 0
        for (j, deg, r) in bases[n].pieces:
            if j == i:
                return off
            off += r
        raise KeyError

    diffs: dict[int, Mat] = {}
    for n in range(lo + 1, hi + 1):
        rows = bases[n - 1].total
        cols = bases[n].total
        M = [[Fraction(0)] * cols for _ in range(rows)]
        for (i, deg, r) in bases[n].pieces:
            if r == 0:
                continue
            c0 = offset(n, i)
            # chain differential: stays in cosim degree i, chain deg - 1
            d = normd[i].diff(deg)
            if d.rows:
                r0 = offset(n - 1, i)
                for a in range(d.rows):
                    for b in range(r):
                        M[r0 + a][c0 + b] += d[a, b]
            # cochain differential: to cosim degree i+1, same chain degree
            if i + 1 < len(normd):
                dc = comaps[i].get(deg)
                if dc is not None and dc.rows:
                    r0 = offset(n - 1, i + 1)
                    sgn = (-1) ** deg
                    for a in range(dc.rows):
                        for b in range(r):
                            M[r0 + a][c0 + b] += sgn * dc[a, b]
        diffs[n] = Mat(rows, cols, M)
    return TotComplex(V.ring, bases, diffs, window)


class TotComplex:
    """A windowed total complex; degrees outside the window are absent."""

    def __init__(self, ring, bases, diffs, window):
        self.ring = ring
        self.bases = bases
        self.diffs = diffs
        self.window = window
        lo, hi = window
        for n in range(lo + 2, hi + 1):
            if not (self.diffs[n - 1] * self.diffs[n]).is_zero():
                raise ValueError("total differential does not square to zero")

    def rank(self, n: int) -> int:
        b = self.bases.get(n)
        return b.total if b else 0

    def diff(self, n: int) -> Mat:
        return self.diffs.get(n, Mat.zeros(self.rank(n - 1), self.rank(n)))

    def homology_dims(self) -> dict[int, int]:
        """Fraction-field homology dimensions on interior window degrees."""
        lo, hi = self.window
        out = {}
        for n in range(lo + 1, hi):
            out[n] = self.rank(n) - self.diff(n).rank() - self.diff(n + 1).rank()
        return out


# ---------------------------------------------------------------------------
# shuffle products
# ---------------------------------------------------------------------------


class SimplicialAlgebra:
    """A simplicial module with level-wise commutative multiplication tables.

    ``mult[n][(a, b)]`` is the product of basis vectors a, b of level n, as a
    coefficient vector.
    """

    def __init__(self, module: SimplicialModule, mult: Sequence, unit: Sequence,
                 validate: bool = True):
        self.module = module
        self.mult = list(mult)  # mult[n]: list of lists of coefficient tuples
        self.unit = list(unit)  # unit[n]: coefficient vector of 1 at level n
        if validate:
            self.validate()

    def product_vec(self, n: int, x: Sequence, y: Sequence) -> tuple:
        r = self.module.rank(n)
        out = [Fraction(0)] * r
        for a in range(r):
            if x[a] == 0:
                continue
            for b in range(r):
                if y[b] == 0:
                    continue
                coeffs = self.mult[n][a][b]
                for c in range(r):
                    out[c] += Fraction(x[a]) * Fraction(y[b]) * coeffs[c]
        return tuple(out)

    def validate(self):
        for n in range(self.module.top + 1):
            r = self.module.rank(n)
            basis = [tuple(Fraction(1 if i == j else 0) for j in range(r))
                     for i in range(r)]
            for a in range(r):
                for b in range(r):
                    ab = self.product_vec(n, basis[a], basis[b])
                    ba = self.product_vec(n, basis[b], basis[a])
                    if ab != ba:
                        raise ValueError("multiplication not commutative")
                    for c in range(r):
                        lhs = self.product_vec(n, ab, basis[c])
                        rhs = self.product_vec(n, basis[a],
                                               self.product_vec(n, basis[b], basis[c]))
                        if lhs != rhs:
                            raise ValueError("multiplication not associative")


def shuffles(p: int, q: int):
    """(p,q)-shuffles as (Sx, Sy, sign).

    Sx (size q) lists the degeneracies applied to the degree-p factor and Sy
    (size p) those applied to the degree-q factor; the sign is the parity of
    the number of inversions between the two sets.
    """
    out = []
    for Sx in itertools.combinations(range(p + q), q):
        Sy = tuple(v for v in range(p + q) if v not in Sx)
        inv = sum(1 for a in Sx for b in Sy if a > b)
        out.append((Sx, Sy, (-1) ** inv))
    return out


@dataclass
class DGAlgebra:
    """Bounded dg-algebra with exact coefficients.

    ``ranks[p]`` for p in [0, top]; ``diff[p]`` maps degree p to p-1 (chain)
    or p+1 when ``cochain`` is set; ``mult[(p, q)]`` maps pairs of basis
    indices to coefficient vectors in degree p+q.
    """

    ranks: list[int]
    diff: dict[int, Mat]
    mult: dict[tuple[int, int], list[list[tuple]]]
    cochain: bool = False

    def rank(self, p: int) -> int:
        return self.ranks[p] if 0 <= p < len(self.ranks) else 0

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def product_vec(self, p: int, q: int, x: Sequence, y: Sequence) -> tuple:
        table = self.mult.get((p, q))
        out = [Fraction(0)] * self.rank(p + q)
        if table is None:
            return tuple(out)
        for a in range(self.rank(p)):
            if x[a] == 0:
                continue
            for b in range(self.rank(q)):
                if y[b] == 0:
                    continue
                for c, coef in enumerate(table[a][b]):
                    out[c] += Fraction(x[a]) * Fraction(y[b]) * coef
        return tuple(out)

    def check_axioms(self):
        for p in range(self.top + 1):
            d1 = self.diff.get(p)
            d2 = self.diff.get(p - 1 if not self.cochain else p + 1)
            if d1 is not None and d2 is not None and not (d2 * d1).is_zero():
                raise ValueError("d o d != 0")
        for p in range(self.top + 1):
            for q in range(self.top + 1 - p):
                for a in range(self.rank(p)):
                    xa = tuple(Fraction(1 if i == a else 0) for i in range(self.rank(p)))
                    for b in range(self.rank(q)):
                        yb = tuple(Fraction(1 if i == b else 0) for i in range(self.rank(q)))
                        ab = self.product_vec(p, q, xa, yb)
                        ba = self.product_vec(q, p, yb, xa)
                        sgn = (-1) ** (p * q)
                        if ab != tuple(sgn * v for v in ba):
                            raise ValueError("product not graded-commutative")


def shuffle_dga(A: SimplicialAlgebra) -> DGAlgebra:
    """The Eilenberg-Zilber shuffle product on the normalized complex.

    Products of normalized elements are computed in the ambient level and
    projected back along the splitting A_n = N_n (+) D_n; the degenerate part
    D_n is a shuffle ideal, so this is the quotient algebra structure.
    """
    nc = normalize(A.module)
    N = nc.complex
    incls = nc.inclusions
    mult: dict[tuple[int, int], list[list[tuple]]] = {}
    top = A.module.top

    # splitting matrices [N-basis | degenerate basis] per level
    split = []
    for n in range(top + 1):
        cols = [incls[n].col(j) for j in range(incls[n].cols)]
        ncols = len(cols)
        if n > 0:
            for i in range(n):
                s = A.module.s(n - 1, i)
                for j in range(s.cols):
                    cols.append(s.col(j))
        m = mat_from_cols(cols, A.module.rank(n))
        split.append((m, ncols))

    def project(n, vec):
        m, ncols = split[n]
        sol = m.solve(vec)
        if sol is None:
            raise ValueError("vector outside N + degenerate span")
        return tuple(sol[:ncols])

    def degen_word_matrix(indices, n_from):
        """Matrix of s_{i_k} ... s_{i_1} for increasing indices i_1 < ... < i_k."""
        m = Mat.identity(A.module.rank(n_from))
        lev = n_from
        for i in indices:
            m = A.module.s(lev, i) * m
            lev += 1
        return m

    for p in range(top + 1):
        for q in range(top + 1 - p):
            n = p + q
            table = []
            for a in range(N.rank(p)):
                xa = incls[p].col(a)
                row = []
                for b in range(N.rank(q)):
                    yb = incls[q].col(b)
                    acc = [Fraction(0)] * A.module.rank(n)
                    for Sx, Sy, sgn in shuffles(p, q):
                        sx = degen_word_matrix(Sx, p).apply(xa)
                        sy = degen_word_matrix(Sy, q).apply(yb)
                        prod = A.product_vec(n, sx, sy)
                        for c in range(A.module.rank(n)):
                            acc[c] += sgn * prod[c]
                    row.append(project(n, acc))
                table.append(row)
            mult[(p, q)] = table
    return DGAlgebra(ranks=list(N.ranks), diff=dict(N.diffs), mult=mult)
