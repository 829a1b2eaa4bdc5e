"""Polynomial differential forms on simplices, exact simplex integration, and
the Thom-Sullivan construction.

Forms on the n-simplex live in QQ[t_0..t_n, dt_0..dt_n]/(sum t_i - 1, sum dt_i)
and are stored in the canonical chart eliminating t_0 and dt_0.  The weight of
a monomial form is its polynomial degree plus its form degree; weights are
only filtered (not graded) by the simplicial operators, so all computations
happen on the finite filtration pieces  weight <= bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import Mat, mat_from_cols
from .simpset import OrdinalMap
from . import dkab

Term = tuple[tuple[int, ...], tuple[int, ...]]  # (exponents of t_1..t_n, dt index set)


class PolyForm:
    """A rational differential form on the n-simplex, canonical chart."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict):
        self.n = n
        self.terms = {}
        for (e, s), c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            e = tuple(e)
            s = tuple(s)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError("bad exponent vector")
            if any(a >= b for a, b in zip(s, s[1:])) or any(not 1 <= i <= n for i in s):
                raise ValueError("dt indices must be strictly increasing in 1..n")
            self.terms[(e, s)] = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "PolyForm":
        return cls(n, {})

    @classmethod
    def const(cls, n: int, c) -> "PolyForm":
        return cls(n, {((0,) * n, ()): Fraction(c)})

    @classmethod
    def coord(cls, n: int, i: int) -> "PolyForm":
        """The barycentric coordinate t_i; t_0 is 1 - sum of the others."""
        if i == 0:
            out = cls.const(n, 1)
            for j in range(1, n + 1):
                out = out - cls.coord(n, j)
            return out
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {(tuple(e), ()): Fraction(1)})

    @classmethod
    def dt(cls, n: int, i: int) -> "PolyForm":
        if i == 0:
            out = cls.zero(n)
            for j in range(1, n + 1):
                out = out - cls.dt(n, j)
            return out
        return cls(n, {((0,) * n, (i,)): Fraction(1)})

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "PolyForm") -> "PolyForm":
        assert self.n == other.n
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return PolyForm(self.n, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "PolyForm":
        c = Fraction(c)
        return PolyForm(self.n, {k: c * v for k, v in self.terms.items()})

    def wedge(self, other: "PolyForm") -> "PolyForm":
        assert self.n == other.n
        out: dict = {}
        for (e1, s1), c1 in self.terms.items():
            for (e2, s2), c2 in other.terms.items():
                if set(s1) & set(s2):
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                merged = s1 + s2
                # sort with sign
                sgn = 1
                lst = list(merged)
                for i in range(len(lst)):
                    for j in range(len(lst) - 1 - i):
                        if lst[j] > lst[j + 1]:
                            lst[j], lst[j + 1] = lst[j + 1], lst[j]
                            sgn = -sgn
                key = (e, tuple(lst))
                out[key] = out.get(key, Fraction(0)) + sgn * c1 * c2
        return PolyForm(self.n, out)

    def differential(self) -> "PolyForm":
        out: dict = {}
        for (e, s), c in self.terms.items():
            for i in range(1, self.n + 1):
                if e[i - 1] == 0 or i in s:
                    continue
                ne = list(e)
                ne[i - 1] -= 1
                # dt_i moved past the dt_j with j < i
                sgn = (-1) ** sum(1 for j in s if j < i)
                key = (tuple(ne), tuple(sorted(s + (i,))))
                out[key] = out.get(key, Fraction(0)) + sgn * c * e[i - 1]
        return PolyForm(self.n, out)

    def form_degree(self) -> int:
        degs = {len(s) for (_, s) in self.terms}
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError("mixed form degree")
        return degs.pop()

    def weight(self) -> int:
        return max((sum(e) + len(s) for (e, s) in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, PolyForm) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def pullback(self, f: OrdinalMap) -> "PolyForm":
        """Pull back along the affine map of simplices induced by f: [m] -> [n].

        Vertex k of the source goes to vertex f(k), so t_j pulls back to the
        sum of the s_k over the preimage of j.
        """
        if f.dst != self.n:
            raise ValueError("dimension mismatch")
        m = f.src
        t_sub = []
        dt_sub = []
        for j in range(1, self.n + 1):
            tt = PolyForm.zero(m)
            dd = PolyForm.zero(m)
            for k in range(m + 1):
                if f.values[k] == j:
                    tt = tt + PolyForm.coord(m, k)
                    dd = dd + PolyForm.dt(m, k)
            t_sub.append(tt)
            dt_sub.append(dd)
        out = PolyForm.zero(m)
        for (e, s), c in self.terms.items():
            term = PolyForm.const(m, c)
            for j in range(1, self.n + 1):
                for _ in range(e[j - 1]):
                    term = term.wedge(t_sub[j - 1])
            for i in s:
                term = term.wedge(dt_sub[i - 1])
            out = out + term
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, s), c in sorted(self.terms.items()):
            factors = []
            if abs(c) != 1 or (not any(e) and not s):
                factors.append(str(abs(c)))
            for i, x in enumerate(e):
                if x == 1:
                    factors.append(f"t{i + 1}")
                elif x > 1:
                    factors.append(f"t{i + 1}^{x}")
            if s:
                factors.append("^".join(f"dt{i}" for i in s))
            parts.append(("- " if c < 0 else "+ ") + "*".join(factors))
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    __repr__ = __str__


def parse_form(text: str, n: int) -> PolyForm:
    """Parse forms in the documented grammar, e.g. '1/2*t1^2*dt1^dt2 - t2*dt1'."""
    out = PolyForm.zero(n)
    text = text.replace("-", "+-")
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sign = Fraction(1)
        if chunk.startswith("-"):
            sign = Fraction(-1)
            chunk = chunk[1:].strip()
        term = PolyForm.const(n, sign)
        for factor in chunk.split("*"):
            factor = factor.strip()
            if not factor:
                continue
            if factor[0].isdigit():
                term = term.scale(Fraction(factor))
            elif factor.startswith("dt"):
                for dtf in factor.split("^"):
                    if not dtf.startswith("dt"):
                        raise ValueError(f"bad dt factor {factor!r}")
                    term = term.wedge(PolyForm.dt(n, int(dtf[2:])))
            elif factor.startswith("t"):
                if "^" in factor:
                    name, exp = factor.split("^")
                else:
                    name, exp = factor, "1"
                for _ in range(int(exp)):
                    term = term.wedge(PolyForm.coord(n, int(name[1:])))
            else:
                raise ValueError(f"bad factor {factor!r}")
        out = out + term
    return out


def face_restrict(a: PolyForm, i: int) -> PolyForm:
    """Restriction to the i-th face (the coface delta^i pullback)."""
    return a.pullback(OrdinalMap.coface(a.n, i))


def degeneracy_pull(a: PolyForm, i: int) -> PolyForm:
    return a.pullback(OrdinalMap.codegeneracy(a.n, i))


def product(a: PolyForm, b: PolyForm) -> PolyForm:
    return a.wedge(b)


def differential(a: PolyForm) -> PolyForm:
    return a.differential()


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------


def simplex_integral(a: PolyForm) -> Fraction:
    """Exact integral of a top-degree form over the standard simplex.

    Uses the Dirichlet formula  int t^a dt_1...dt_n = (prod a_i!)/(n+sum a)!.
    """
    n = a.n
    total = Fraction(0)
    for (e, s), c in a.terms.items():
        if len(s) != n:
            raise ValueError("form is not of top dt-degree")
        # s is strictly increasing and covers 1..n exactly
        num = Fraction(1)
        for x in e:
            num *= math.factorial(x)
        total += c * Fraction(num, math.factorial(n + sum(e)))
    return total


def stokes_residual(a: PolyForm) -> Fraction:
    """int d(a) - alternating sum of face integrals; zero by Stokes."""
    n = a.n
    if a.form_degree() != n - 1:
        raise ValueError("stokes check needs an (n-1)-form on the n-simplex")
    lhs = simplex_integral(a.differential())
    rhs = Fraction(0)
    for i in range(n + 1):
        rhs += Fraction((-1) ** i) * simplex_integral(face_restrict(a, i))
    return lhs - rhs


@dataclass
class IntegrationReport:
    checked: int
    failures: list
    cochains: list

    @property
    def verdict(self):
        return not self.failures


def monomial_forms(n: int, p: int, max_weight: int) -> list[PolyForm]:
    out = []
    for s in itertools.combinations(range(1, n + 1), p):
        for deg in range(0, max_weight - p + 1):
            for e in _exponents(n, deg):
                out.append(PolyForm(n, {(e, s): Fraction(1)}))
    return out


def _exponents(n: int, total: int):
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _exponents(n - 1, total - first):
            yield (first,) + rest


def _monotone_maps(m: int, n: int):
    return [vals for vals in
            itertools.combinations_with_replacement(range(n + 1), m + 1)]


def integrate_cochain(omega: PolyForm) -> dict[tuple[int, ...], Fraction]:
    """The simplex cochain  f |-> int f^* omega  on p-simplices of Delta^n."""
    p = omega.form_degree()
    out = {}
    for vals in _monotone_maps(p, omega.n):
        f = OrdinalMap(p, omega.n, vals)
        pulled = omega.pullback(f)
        out[vals] = simplex_integral(pulled) if p > 0 else _evaluate_scalar0(pulled)
    return out


def integration_map_check(m: int, samples: Sequence[PolyForm]) -> IntegrationReport:
    """Verify the cochain-map identity for integration on sample forms.

    For each form the Stokes identity is checked exactly against all
    cofaces; degenerate simplices must integrate to zero (conormalization).
    """
    failures = []
    cochains = []
    for omega in samples:
        assert omega.n == m
        p = omega.form_degree()
        # Stokes against every (p+1)-simplex of Delta^m
        for vals in _monotone_maps(p + 1, m):
            f = OrdinalMap(p + 1, m, vals)
            pulled = omega.pullback(f)
            lhs = simplex_integral(pulled.differential())
            rhs = Fraction(0)
            for i in range(p + 2):
                rhs += Fraction((-1) ** i) * simplex_integral(
                    face_restrict(pulled, i))
            if lhs != rhs:
                failures.append((str(omega), vals, lhs - rhs))
        cochain = {}
        for vals in _monotone_maps(p, m):
            f = OrdinalMap(p, m, vals)
            pulled = omega.pullback(f)
            val = simplex_integral(pulled) if p > 0 else _evaluate_scalar0(pulled)
            cochain[vals] = val
            if len(set(vals)) < p + 1 and val != 0:
                failures.append((str(omega), vals, "degenerate simplex not killed"))
        cochains.append(cochain)
    return IntegrationReport(len(samples), failures, cochains)


def _evaluate_scalar0(form0: PolyForm) -> Fraction:
    # a 0-form on the 0-simplex is a constant
    assert form0.n == 0
    return form0.terms.get(((), ()), Fraction(0))


# ---------------------------------------------------------------------------
# weight-filtered slices of Omega_n
# ---------------------------------------------------------------------------


def omega_slice_basis(n: int, p: int, wmax: int) -> list[Term]:
    """Monomial basis of the p-forms of weight <= wmax."""
    out = []
    for s in itertools.combinations(range(1, n + 1), p):
        for deg in range(0, wmax - p + 1):
            for e in _exponents(n, deg):
                out.append((e, s))
    return out


def form_in_basis(a: PolyForm, basis: Sequence[Term]) -> list[Fraction]:
    index = {b: i for i, b in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for k, c in a.terms.items():
        if k not in index:
            raise ValueError("form outside the weight window")
        vec[index[k]] = c
    return vec


def omega_d_matrix(n: int, p: int, wmax: int) -> Mat:
    src = omega_slice_basis(n, p, wmax)
    dst = omega_slice_basis(n, p + 1, wmax)
    cols = []
    for b in src:
        form = PolyForm(n, {b: Fraction(1)})
        cols.append(form_in_basis(form.differential(), dst))
    return mat_from_cols(cols, len(dst))


def omega_pullback_matrix(f: OrdinalMap, p: int, wmax: int) -> Mat:
    src = omega_slice_basis(f.dst, p, wmax)
    dst = omega_slice_basis(f.src, p, wmax)
    cols = []
    for b in src:
        form = PolyForm(f.dst, {b: Fraction(1)})
        cols.append(form_in_basis(form.pullback(f), dst))
    return mat_from_cols(cols, len(dst))


def omega_cohomology_dims(n: int, wmax: int) -> tuple[int, ...]:
    """Cohomology dimensions of the filtered complex F_{<= wmax} Omega_n."""
    dims = []
    for p in range(n + 1):
        d_out = omega_d_matrix(n, p, wmax)
        d_in = omega_d_matrix(n, p - 1, wmax) if p >= 1 else None
        rank_in = d_in.rank() if d_in is not None else 0
        dims.append(len(omega_slice_basis(n, p, wmax)) - d_out.rank() - rank_in)
    return tuple(dims)


# ---------------------------------------------------------------------------
# Thom-Sullivan levels
# ---------------------------------------------------------------------------


@dataclass
class WeightedDGA:
    """A non-negatively graded chain dg-algebra with an extra integer weight.

    basis[(p, w)] is a list of labels; diff maps (p, w) -> (p-1, w); the
    product maps (p1, w1) x (p2, w2) -> (p1+p2, w1+w2).
    """

    basis: dict[tuple[int, int], list[str]]
    diff: dict[tuple[int, int], Mat]
    mult: dict  # ((p1,w1),(p2,w2)) -> table [i][j] -> coefficient list

    def dims(self, p: int, w: int) -> int:
        return len(self.basis.get((p, w), []))

    @property
    def top_degree(self) -> int:
        return max((p for (p, _) in self.basis), default=0)

    def weights(self) -> list[int]:
        return sorted({w for (_, w) in self.basis})

    def d_mat(self, p: int, w: int) -> Mat:
        m = self.diff.get((p, w))
        if m is None:
            return Mat.zeros(self.dims(p - 1, w), self.dims(p, w))
        return m

    def product(self, k1, i, k2, j) -> dict:
        table = self.mult.get((k1, k2))
        if table is None:
            return {}
        return table[i][j]


def polynomial_line_dga(top_weight: int) -> WeightedDGA:
    """QQ[x] truncated at x^top_weight, concentrated in degree 0, wt(x)=1."""
    basis = {(0, w): [f"x^{w}"] for w in range(top_weight + 1)}
    mult = {}
    for w1 in range(top_weight + 1):
        for w2 in range(top_weight + 1):
            if w1 + w2 <= top_weight:
                mult[((0, w1), (0, w2))] = [[{0: Fraction(1)}]]
    return WeightedDGA(basis, {}, mult)


def rationals_dga() -> WeightedDGA:
    return WeightedDGA({(0, 0): ["1"]}, {},
                       {((0, 0), (0, 0)): [[{0: Fraction(1)}]]})


@dataclass
class TSLevel:
    """A finite slice of T(B)_n: solutions of the matching condition on
    weight-filtered pieces."""

    n: int
    bweight: int
    omega_bound: int
    pieces: list[tuple[int, int, list[Term], list[str]]]
    # (p, w_b fixed) with omega basis and B basis; flattened coordinates
    vectors: list[tuple]  # basis of the solution space

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def _ts_ambient(B: WeightedDGA, n: int, bweight: int, omega_bound: int):
    """Ambient pieces  Omega_n^p (wt <= bound) (x) B_{p, bweight}."""
    pieces = []
    for p in range(min(n, B.top_degree) + 1):
        bb = B.basis.get((p, bweight), [])
        if not bb:
            continue
        pieces.append((p, omega_slice_basis(n, p, omega_bound), bb))
    return pieces


def thom_sullivan_level(B: WeightedDGA, n: int, weight_bound: int,
                        bweight: int = 0) -> TSLevel:
    """The weight-(bweight) slice of T(B)_n within the Omega filtration.

    Elements are tuples (x_p) with x_p in Omega_n^p (x) B_p subject to
    d_Omega x_p = (1 (x) d_B) x_{p+1}.
    """
    pieces = _ts_ambient(B, n, bweight, weight_bound)
    sizes = [len(ob) * len(bb) for (_, ob, bb) in pieces]
    total = sum(sizes)
    offset = {}
    off = 0
    for (p, ob, bb), s in zip(pieces, sizes):
        offset[p] = off
        off += s

    rows = []
    # condition per p: d_Omega x_p - (1 (x) d_B) x_{p+1} = 0,
    # valued in Omega^{p+1} (x) B_p
    for idx, (p, ob, bb) in enumerate(pieces):
        target_ob = omega_slice_basis(n, p + 1, weight_bound)
        t_index = {b: i for i, b in enumerate(target_ob)}
        nrows = len(target_ob) * len(bb)
        row_block = [[Fraction(0)] * total for _ in range(nrows)]
        dmat = omega_d_matrix(n, p, weight_bound)
        for oi, ob_elt in enumerate(ob):
            for bi in range(len(bb)):
                col = offset[p] + oi * len(bb) + bi
                for ti in range(dmat.rows):
                    c = dmat[ti, oi]
                    if c:
                        row_block[ti * len(bb) + bi][col] += c
        # the (p+1)-piece maps in via 1 (x) d_B
        nxt = next(((pp, ob2, bb2) for (pp, ob2, bb2) in pieces if pp == p + 1), None)
        if nxt is not None:
            _, ob2, bb2 = nxt
            dB = B.d_mat(p + 1, bweight)
            for oi, b2 in enumerate(ob2):
                if b2 not in t_index:
                    continue
                ti = t_index[b2]
                for bj in range(len(bb2)):
                    col = offset[p + 1] + oi * len(bb2) + bj
                    for bi in range(dB.rows):
                        c = dB[bi, bj]
                        if c:
                            row_block[ti * len(bb) + bi][col] -= c
        rows.extend(row_block)
    M = Mat(len(rows), total, rows) if rows else Mat.zeros(0, total)
    vectors = M.nullspace() if total else []
    return TSLevel(n, bweight, weight_bound, pieces, vectors)


def ts_structure_matrix(B: WeightedDGA, f: OrdinalMap, weight_bound: int,
                        bweight: int, src: TSLevel, dst: TSLevel) -> Mat:
    """Matrix of the simplicial operator T(B)(f) between solved slices."""
    # ambient map: pullback on Omega factors, identity on B
    cols = []
    dst_sizes = [len(ob) * len(bb) for (_, ob, bb) in dst.pieces]
    dst_total = sum(dst_sizes)
    dst_offset = {}
    off = 0
    for (p, ob, bb), s in zip(dst.pieces, dst_sizes):
        dst_offset[p] = off
        off += s
    dst_basis_mat = mat_from_cols(dst.vectors, dst_total) if dst.vectors else Mat.zeros(dst_total, 0)
    for v in src.vectors:
        img = [Fraction(0)] * dst_total
        pos = 0
        for (p, ob, bb) in src.pieces:
            pb = omega_pullback_matrix(f, p, weight_bound)
            dst_piece = next(((pp, ob2, bb2) for (pp, ob2, bb2) in dst.pieces
                              if pp == p), None)
            block = len(bb)
            if dst_piece is not None:
                _, ob2, bb2 = dst_piece
                for oi in range(len(ob)):
                    for bi in range(block):
                        c = v[pos + oi * block + bi]
                        if c:
                            for ti in range(pb.rows):
                                if pb[ti, oi]:
                                    img[dst_offset[p] + ti * len(bb2) + bi] += c * pb[ti, oi]
            pos += len(ob) * block
        sol = dst_basis_mat.solve(img)
        if sol is None:
            raise ValueError("structure map leaves the solved slice")
        cols.append(sol)
    return mat_from_cols(cols, dst_basis_mat.cols)


def ts_simplicial_module(B: WeightedDGA, levels: int, weight_bound: int,
                         bweight: int = 0) -> dkab.SimplicialModule:
    """T(B) as a simplicial QQ-module on the solved slices, levels 0..levels."""
    slices = [thom_sullivan_level(B, n, weight_bound, bweight)
              for n in range(levels + 1)]
    ranks = [s.dimension for s in slices]
    face = {}
    degen = {}
    for n in range(1, levels + 1):
        for i in range(n + 1):
            face[(n, i)] = ts_structure_matrix(
                B, OrdinalMap.coface(n, i), weight_bound, bweight,
                slices[n], slices[n - 1])
    for n in range(levels):
        for i in range(n + 1):
            degen[(n, i)] = ts_structure_matrix(
                B, OrdinalMap.codegeneracy(n, i), weight_bound, bweight,
                slices[n], slices[n + 1])
    return dkab.SimplicialModule("QQ", ranks, face, degen)


@dataclass
class DequivReport:
    weights: list[int]
    pi_a: dict  # weight -> tuple of dims
    pi_t: dict
    verdict: bool


def dequiv_check(B: WeightedDGA, weight_bound: int, levels: int = 3) -> DequivReport:
    """Compare homotopy of the constant simplicial algebra on B (degree 0)
    with that of T(B), per weight slice.

    ``B`` must be concentrated in degree 0 (a graded commutative algebra);
    the left side then has pi_0 = B and vanishing higher homotopy.
    """
    if B.top_degree != 0:
        raise ValueError("dequiv_check expects a discrete algebra")
    weights = B.weights()
    pi_a = {}
    pi_t = {}
    ok = True
    for w in weights:
        dims_a = [B.dims(0, w)] + [0] * (levels - 1)
        pi_a[w] = tuple(dims_a)
        mod = ts_simplicial_module(B, levels, weight_bound, bweight=w)
        hom = dkab.homology(dkab.normalize(mod).complex, up_to=levels - 1)
        dims_t = tuple(h[0] for h in hom)
        pi_t[w] = dims_t
        if dims_t != tuple(dims_a):
            ok = False
    return DequivReport(weights, pi_a, pi_t, ok)
