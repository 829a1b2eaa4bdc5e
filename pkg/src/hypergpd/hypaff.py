"""Hypergroupoids in affine schemes presented by componented cosimplicial
algebras: matching algebras, cover certificates, Cech nerves, builtin stacks,
Cartesian modules, Cech cohomology, and truncated derived Cartesianification.

Disjoint unions of affine schemes are finite lists of finitely presented
QQ-algebras; a scheme map is a component function together with one algebra
map per source component.  All verification is by normal forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import dkab
from . import simpset as ss
from .linalg import Mat, mat_from_cols
from .qalg import (AlgebraMap, FPAlgebra, Poly, WindowOverflowError,
                   inverse_algebra_map, is_unit_ideal, localize, maps_equal,
                   monomials_of_weight, parse_poly, pushout_algebra)
from .simpset import FinSSet, OrdinalMap, standard_complex


class ComponentedAlgebra:
    """O of a finite disjoint union of affine schemes."""

    def __init__(self, components: Sequence[FPAlgebra]):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("component list must be nonempty")

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i) -> FPAlgebra:
        return self.components[i]

    def __repr__(self):
        return f"ComponentedAlgebra({len(self.components)} components)"


def point_algebra() -> ComponentedAlgebra:
    return ComponentedAlgebra([FPAlgebra.rationals()])


@dataclass
class CAlgMap:
    """A scheme map between disjoint unions: Spec(target) -> Spec(source)
    is *not* the convention here -- the map goes in the scheme direction
    ``src_scheme -> dst_scheme``, carried by ``comp`` on components and a
    ring map dst[comp[j]] -> src[j] for each source component j.
    """

    src: ComponentedAlgebra
    dst: ComponentedAlgebra
    comp: tuple[int, ...]
    alg: tuple[AlgebraMap, ...]

    def __post_init__(self):
        assert len(self.comp) == len(self.src) == len(self.alg)
        for j, a in enumerate(self.alg):
            assert a.source is self.dst[self.comp[j]] or \
                a.source.vars == self.dst[self.comp[j]].vars
            assert a.target is self.src[j] or a.target.vars == self.src[j].vars

    def then(self, other: "CAlgMap") -> "CAlgMap":
        """Composite scheme map  self ; other  (self first)."""
        comp = tuple(other.comp[self.comp[j]] for j in range(len(self.src)))
        alg = tuple(self.alg[j].compose(other.alg[self.comp[j]])
                    for j in range(len(self.src)))
        return CAlgMap(self.src, other.dst, comp, alg)

    def equals(self, other: "CAlgMap") -> bool:
        if self.comp != other.comp:
            return False
        return all(maps_equal(a, b) for a, b in zip(self.alg, other.alg))

    @classmethod
    def identity(cls, A: ComponentedAlgebra) -> "CAlgMap":
        return cls(A, A, tuple(range(len(A))),
                   tuple(AlgebraMap.identity(c) for c in A.components))


class AffHypergroupoid:
    """A simplicial diagram of disjoint unions of affine schemes.

    ``face[(n, i)]`` is the scheme map level n -> level n-1 and
    ``degen[(n, i)]`` the scheme map level n -> level n+1; the simplicial
    identities are verified by normal forms on construction.
    """

    def __init__(self, levels: Sequence[ComponentedAlgebra],
                 face: dict[tuple[int, int], CAlgMap],
                 degen: dict[tuple[int, int], CAlgMap],
                 coskeletal_above: Optional[int] = None,
                 weight_basis_fn: Optional[Callable] = None,
                 base_map: Optional[CAlgMap] = None,
                 component_labels: Optional[list] = None,
                 validate: bool = True):
        self.levels = list(levels)
        self.face = dict(face)
        self.degen = dict(degen)
        self.coskeletal_above = coskeletal_above
        self.weight_basis_fn = weight_basis_fn
        self.base_map = base_map  # X_0 -> base scheme, for the relative case
        self.component_labels = component_labels
        self._ordmap_cache: dict = {}
        if validate:
            self.validate()

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def level(self, n: int) -> ComponentedAlgebra:
        return self.levels[n]

    def d(self, n: int, i: int) -> CAlgMap:
        return self.face[(n, i)]

    def s(self, n: int, i: int) -> CAlgMap:
        return self.degen[(n, i)]

    def validate(self):
        for n in range(2, self.top + 1):
            for j in range(1, n + 1):
                for i in range(j):
                    lhs = self.d(n, j).then(self.d(n - 1, i))
                    rhs = self.d(n, i).then(self.d(n - 1, j - 1))
                    if not lhs.equals(rhs):
                        raise ValueError(f"face identity d_{i} d_{j} fails at level {n}")
        for n in range(self.top - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    lhs = self.s(n, i).then(self.s(n + 1, j + 1))
                    rhs = self.s(n, j).then(self.s(n + 1, i))
                    if not lhs.equals(rhs):
                        raise ValueError(f"degeneracy identity fails at level {n}")
        for n in range(self.top):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self.s(n, j).then(self.d(n + 1, i))
                    if i < j:
                        rhs = self.d(n, i).then(self.s(n - 1, j - 1))
                    elif i in (j, j + 1):
                        rhs = CAlgMap.identity(self.level(n))
                    else:
                        rhs = self.d(n, i - 1).then(self.s(n - 1, j))
                    if not lhs.equals(rhs):
                        raise ValueError(f"d_{i} s_{j} identity fails at level {n}")

    def ordmap_scheme_map(self, f: OrdinalMap) -> CAlgMap:
        """The scheme map X_{f.dst} -> X_{f.src} induced by f: [src] -> [dst]."""
        key = (f.src, f.dst, f.values)
        cached = self._ordmap_cache.get(key)
        if cached is not None:
            return cached
        n, m = f.dst, f.src
        if f.is_identity():
            out = CAlgMap.identity(self.level(n))
        else:
            vals = f.values
            out = None
            for j in range(m):
                if vals[j] == vals[j + 1]:
                    smaller = OrdinalMap(m - 1, n, vals[:j] + vals[j + 1:])
                    out = self.ordmap_scheme_map(smaller).then(self.s(m - 1, j))
                    break
            if out is None:
                missing = max(v for v in range(n + 1) if v not in vals)
                smaller = OrdinalMap(m, n - 1,
                                     tuple(v if v < missing else v - 1 for v in vals))
                out = self.d(n, missing).then(self.ordmap_scheme_map(smaller))
        self._ordmap_cache[key] = out
        return out

    def __repr__(self):
        return (f"AffHypergroupoid(levels={[len(l) for l in self.levels]}, "
                f"cosk>{self.coskeletal_above})")


# ---------------------------------------------------------------------------
# presentation simplification
# ---------------------------------------------------------------------------


def simplify_presentation(A: FPAlgebra):
    """Eliminate variables with linear solvable relations  v - p  (v not in p).

    Returns (B, to_B: A -> B, from_B: B -> A) with both maps mutually inverse.
    """
    vars = list(A.vars)
    rels = list(A.relations)
    images = {v: None for v in vars}  # image in the reduced algebra, lazily
    subst: dict[str, Poly] = {}

    def substitute_everywhere(v, p):
        nonlocal rels
        out = []
        for r in rels:
            out.append(r.substitute(r.vars, {w: (p if w == v else Poly.var(r.vars, w))
                                             for w in r.vars}))
        rels = [r for r in out if not r.is_zero()]
        for w in list(subst):
            q = subst[w]
            subst[w] = q.substitute(q.vars, {u: (p if u == v else Poly.var(q.vars, u))
                                             for u in q.vars})

    changed = True
    while changed:
        changed = False
        for r in rels:
            for v in reversed(vars):
                i = vars.index(v)
                # r = c*v + rest with v not elsewhere
                coeff = None
                rest_ok = True
                lin = None
                for e, c in r.terms.items():
                    if e[A.vars.index(v)] == 1 and sum(e) == 1:
                        coeff = c
                    elif e[A.vars.index(v)] != 0:
                        rest_ok = False
                        break
                if coeff is None or not rest_ok:
                    continue
                p = (r - Poly.var(A.vars, v).scale(coeff)).scale(Fraction(-1) / coeff)
                subst[v] = p
                vars.remove(v)
                rels.remove(r)
                substitute_everywhere(v, p)
                changed = True
                break
            if changed:
                break

    keep = tuple(vars)
    weights = {v: A.weights[v] for v in keep} if A.weights else None

    def to_reduced(poly: Poly) -> Poly:
        cur = poly
        for v, p in subst.items():
            cur = cur.substitute(cur.vars, {w: (p if w == v else Poly.var(cur.vars, w))
                                            for w in cur.vars})
        mapping = {w: w for w in keep}
        out = Poly.zero(keep)
        for e, c in cur.terms.items():
            ne = [0] * len(keep)
            for pos, x in enumerate(e):
                if x:
                    w = A.vars[pos]
                    if w not in keep:
                        raise AssertionError("substitution left an eliminated variable")
                    ne[keep.index(w)] = x
            out = out + Poly(keep, {tuple(ne): c})
        return out

    B = FPAlgebra(keep, [to_reduced(r) for r in rels], weights=weights)
    to_B = AlgebraMap(A, B, {v: B.normal_form(to_reduced(Poly.var(A.vars, v)))
                             for v in A.vars}, validate=False)
    from_B = AlgebraMap(B, A, {v: Poly.var(A.vars, v) for v in keep},
                        validate=False)
    return B, to_B, from_B


# ---------------------------------------------------------------------------
# matching algebras
# ---------------------------------------------------------------------------


@dataclass
class MatchingAlgebra:
    """M_K X as a disjoint union of affine schemes.

    Each component corresponds to a compatible component assignment for the
    nondegenerate cells of K; ``slot_map[g][cell]`` recovers, per component g,
    the map of the assigned level algebra into the colimit algebra.
    """

    K: FinSSet
    algebra: ComponentedAlgebra
    assignments: list[dict[str, int]]
    slot_maps: list[dict[str, AlgebraMap]]


def _component_assignments(K: FinSSet, X: AffHypergroupoid) -> list[dict[str, int]]:
    cells = [(n, c) for n, c in K.all_nondeg()]
    out: list[dict[str, int]] = []
    cur: dict[str, int] = {}

    def compatible(n, c, comp_idx):
        for i, (w, t) in enumerate(K.faces[c]) if n > 0 else []:
            # component of d_i(point at c) must match the degenerated target
            ci = X.d(n, i).comp[comp_idx]
            # target side: X(eta) applied to the point at cell t
            tm = cur[t]
            lev = K.dim_of[t]
            for idx in reversed(w):
                tm = X.s(lev, idx).comp[tm]
                lev += 1
            if ci != tm:
                return False
        return True

    def rec(pos):
        if pos == len(cells):
            out.append(dict(cur))
            return
        n, c = cells[pos]
        for comp_idx in range(len(X.level(n))):
            if compatible(n, c, comp_idx):
                cur[c] = comp_idx
                rec(pos + 1)
                del cur[c]

    rec(0)
    return out


def matching_algebra(K: FinSSet, X: AffHypergroupoid,
                     simplify: bool = True) -> MatchingAlgebra:
    """The matching object Hom(K, X) as a colimit of level algebras.

    For the empty complex this is the point.  Components are indexed by
    compatible component assignments; each component algebra is the pushout
    of the assigned level algebras along face/degeneracy identifications.
    """
    if K.top_dim < 0:
        pt = point_algebra()
        return MatchingAlgebra(K, pt, [dict()], [dict()])
    if K.top_dim > X.top:
        raise ValueError("X stores too few levels for this matching object")
    assignments = _component_assignments(K, X)
    comps = []
    slot_maps = []
    for gamma in assignments:
        vars: list[str] = []
        weights: dict[str, int] = {}
        any_weights = False
        var_of: dict[tuple[str, str], str] = {}
        for n, c in K.all_nondeg():
            A = X.level(n)[gamma[c]]
            for v in A.vars:
                nv = f"{c}|{v}"
                vars.append(nv)
                var_of[(c, v)] = nv
                if A.weights:
                    weights[nv] = A.weights[v]
                    any_weights = True
        cvars = tuple(vars)

        def slot_poly(c, p: Poly) -> Poly:
            A = X.level(K.dim_of[c])[gamma[c]]
            return p.rename(cvars, {v: var_of[(c, v)] for v in A.vars})

        rels = []
        for n, c in K.all_nondeg():
            A = X.level(n)[gamma[c]]
            for r in A.relations:
                rels.append(slot_poly(c, r))
        # identifications: d_i (point at c) = X(eta)(point at t)
        for n, c in K.all_nondeg():
            if n == 0:
                continue
            for i, (w, t) in enumerate(K.faces[c]):
                # both sides are points of level n-1 in component ci
                ci = X.d(n, i).comp[gamma[c]]
                B = X.level(n - 1)[ci]
                dmap = X.d(n, i).alg[gamma[c]]  # B -> level n algebra
                # the degeneracy word as scheme maps from the t slot upward
                lev = K.dim_of[t]
                cur_idx = gamma[t]
                hops = []
                for idx in reversed(w):
                    hops.append((lev, idx, cur_idx))
                    cur_idx = X.s(lev, idx).comp[cur_idx]
                    lev += 1
                for v in B.vars:
                    lhs = slot_poly(c, dmap.images[v])
                    img = Poly.var(B.vars, v)
                    for (lv, idx, src_comp) in reversed(hops):
                        img = X.s(lv, idx).alg[src_comp].apply(img)
                    rhs = slot_poly(t, img)
                    rels.append(lhs - rhs)
        raw = FPAlgebra(cvars, rels, weights=weights if any_weights else None)
        if simplify:
            red, to_red, _ = simplify_presentation(raw)
            comps.append(red)
            sm = {}
            for n, c in K.all_nondeg():
                A = X.level(n)[gamma[c]]
                sm[c] = AlgebraMap(A, red, {
                    v: to_red.images[var_of[(c, v)]] for v in A.vars})
            slot_maps.append(sm)
        else:
            comps.append(raw)
            sm = {}
            for n, c in K.all_nondeg():
                A = X.level(n)[gamma[c]]
                sm[c] = AlgebraMap(A, raw, {
                    v: Poly.var(cvars, var_of[(c, v)]) for v in A.vars})
            slot_maps.append(sm)
    return MatchingAlgebra(K, ComponentedAlgebra(comps), assignments, slot_maps)


def matching_map(K: FinSSet, m: int, X: AffHypergroupoid,
                 M: Optional[MatchingAlgebra] = None) -> tuple[MatchingAlgebra, CAlgMap]:
    """The canonical scheme map X_m -> M_K X for a subcomplex K of Delta^m."""
    if M is None:
        M = matching_algebra(K, X)
    src = X.level(m)
    comp = []
    alg = []
    for c in range(len(src)):
        # restriction of the universal point: assignment induced by c
        gamma = {}
        for n, cell in K.all_nondeg():
            f = ss.cell_inclusion_map(cell, m)
            gamma[cell] = X.ordmap_scheme_map(f).comp[c]
        gi = M.assignments.index(gamma)
        comp.append(gi)
        target_alg = M.algebra[gi]
        # the reduced M-variables are slot variables "cell|v"; their images
        # are the corresponding restrictions of the universal point
        red_images = {}
        for rv in target_alg.vars:
            cell, v = rv.split("|", 1)
            red_images[rv] = src[c].normal_form(
                X.ordmap_scheme_map(ss.cell_inclusion_map(cell, m)).alg[c].images[v])
        alg.append(AlgebraMap(target_alg, src[c], red_images))
    return M, CAlgMap(src, M.algebra, tuple(comp), tuple(alg))


# ---------------------------------------------------------------------------
# certificates and the hypergroupoid check
# ---------------------------------------------------------------------------


@dataclass
class CoverCertificate:
    """Machine-checkable witness that a matching map is a P-covering.

    kinds:
      zariski_localization: data["elements"][src_comp] = poly string/Poly over
        the matching component; the induced map must be the localization.
      smooth_standard: data["witness"][src_comp] = (minor_vars, inverse rows)
        validating a standard-smooth presentation.
      iso: the matching map itself must be an isomorphism.
      user_asserted: data["note"]; taints the verdict.
    """

    kind: str
    data: dict = field(default_factory=dict)


@dataclass
class SchemeHypReport:
    dimension_tested: int
    failures: list = field(default_factory=list)
    tainted: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.verdict


def _validate_iso(f: CAlgMap) -> Optional[str]:
    """None if f is an isomorphism of schemes, else a reason."""
    n_src, n_dst = len(f.src), len(f.dst)
    if sorted(f.comp) != list(range(n_dst)) or n_src != n_dst:
        return "not-injective" if n_src > n_dst else "not-surjective"
    for j, a in enumerate(f.alg):
        if inverse_algebra_map(a) is None:
            return "not-injective"
    return None


def _validate_certificate(cert: CoverCertificate, f: CAlgMap) -> list[str]:
    """Check a certificate against the computed matching map X_m -> M."""
    problems = []
    if cert.kind == "iso":
        reason = _validate_iso(f)
        if reason:
            problems.append(reason)
        return problems
    if cert.kind == "user_asserted":
        return problems
    if cert.kind == "zariski_localization":
        elements = cert.data["elements"]
        for j, a in enumerate(f.alg):
            g = elements[j]
            if isinstance(g, str):
                g = _parse_in_slots(g, a.source)
            loc, incl, invname = localize(a.source, g, "cert_inv")
            inv_img = _element_inverse(a, g)
            if inv_img is None:
                problems.append(f"component {j}: cover element not invertible")
                continue
            images = {v: a.images[v] for v in a.source.vars}
            images[invname] = inv_img
            ext = AlgebraMap(loc, a.target, images)
            if inverse_algebra_map(ext) is None:
                problems.append(f"component {j}: not the localization")
        # joint surjectivity per matching component
        for i in range(len(f.dst)):
            fam = []
            for j, g in enumerate(elements):
                if f.comp[j] != i:
                    continue
                if isinstance(g, str):
                    g = _parse_in_slots(g, f.dst[i])
                fam.append(g)
            if not is_unit_ideal(f.dst[i], fam):
                problems.append(f"matching component {i}: cover elements "
                                f"do not generate the unit ideal")
        return problems
    if cert.kind == "smooth_standard":
        witness = cert.data["witness"]
        for j, a in enumerate(f.alg):
            w = witness[j]
            minor_vars = w["minor_vars"]
            B = a.target
            rels = list(B.relations)
            if len(rels) != len(minor_vars):
                problems.append(f"component {j}: witness shape mismatch")
                continue
            jac = [[B.normal_form(r.derivative(v)) for v in minor_vars]
                   for r in rels]
            from .qalg import poly_det
            det = B.normal_form(poly_det(jac, B.vars)) if rels else B.one()
            inv = w["inverse"]
            if isinstance(inv, str):
                inv = parse_poly(inv, B.vars)
            if not B.elements_equal(det * inv, B.one()):
                problems.append(f"component {j}: Jacobian minor not invertible")
            if B.is_zero_ring():
                problems.append(f"component {j}: empty scheme cannot cover")
        return problems
    problems.append(f"unknown certificate kind {cert.kind}")
    return problems


def _parse_in_slots(text: str, A: FPAlgebra) -> Poly:
    """Parse allowing bare names for slot-prefixed variables ('s' for '0|s')."""
    try:
        return parse_poly(text, A.vars)
    except ValueError:
        pass
    rename = {}
    for v in A.vars:
        bare = v.split("|", 1)[-1]
        if bare not in rename:
            rename[bare] = v
    aux = tuple(sorted(rename))
    p = parse_poly(text, aux)
    return p.rename(A.vars, rename)


def _element_inverse(a: AlgebraMap, g: Poly) -> Optional[Poly]:
    """A polynomial representing 1/a(g) in the target, if a(g) is a unit."""
    B = a.target
    img = B.normal_form(a.apply(g))
    # solve img * h = 1 by linear algebra over a monomial window of candidates
    from .qalg import laurent_structure
    ls = laurent_structure(B)
    if ls is not None:
        # try inverses among Laurent monomial multiples up to small degree
        for cand in _candidate_inverses(B, img):
            if B.elements_equal(img * cand, B.one()):
                return cand
    # generic fallback: y*img - 1 has a solution iff img is a unit; find it by
    # elimination (preimage of 1 under multiplication is not linear, so use
    # the localization trick)
    loc, incl, nm = localize(B, img, "tmp_inv")
    from .qalg import preimage_polynomial
    pre = preimage_polynomial(incl, loc.var(nm))
    return pre


def _candidate_inverses(B: FPAlgebra, img: Poly):
    for v in B.vars:
        for k in (1, 2, 3):
            yield B.normal_form(Poly.var(B.vars, v) ** k)
    yield B.one()


def check_scheme_hypergroupoid(X: AffHypergroupoid, n: int,
                               certs: dict[tuple[int, int], CoverCertificate],
                               max_level: Optional[int] = None) -> SchemeHypReport:
    """Verify the covering/isomorphism conditions for an affine hypergroupoid.

    For m <= n all partial matching maps must be P-coverings, validated
    against supplied certificates; for n < m <= n+2 they must be
    isomorphisms, verified by mutual-inverse construction.
    """
    X.validate()
    report = SchemeHypReport(dimension_tested=n)
    top_check = min(max_level if max_level is not None else n + 2, X.top)
    for m in range(0, top_check + 1):
        for k in range(m + 1):
            if m == 0 and X.base_map is not None:
                # relative case over an affine base: the empty-horn matching
                # object is the base itself
                f = X.base_map
            else:
                K = standard_complex("horn", m, k)
                _, f = matching_map(K, m, X)
            if m <= n:
                cert = certs.get((m, k))
                if cert is None:
                    raise ss.InsufficientDataError(
                        f"no certificate supplied for (m,k)=({m},{k})")
                if cert.kind == "user_asserted":
                    report.tainted.append((m, k, cert.data.get("note", "")))
                problems = _validate_certificate(cert, f)
                for p in problems:
                    report.failures.append((m, k, p))
            else:
                reason = _validate_iso(f)
                if reason:
                    report.failures.append((m, k, reason))
    return report


def resolution_steps(n: int) -> int:
    """Steps f(n) of the doubling recurrence f(r+1) = 2 f(r) + 1, f(0) = 0."""
    f = 0
    for _ in range(n):
        f = 2 * f + 1
    return f


# ---------------------------------------------------------------------------
# Cech nerves and builtin stacks
# ---------------------------------------------------------------------------


def _tuple_components(n: int, count: int):
    return list(itertools.product(range(count), repeat=n + 1))


def cech_nerve(A: FPAlgebra, cover: Sequence[Poly], up_to: int = 3) -> AffHypergroupoid:
    """cosk_0 of the cover  ⊔ Spec A_{f_i} -> Spec A.

    Level n has one component per (n+1)-tuple of cover indices, with algebra
    A localized at the product of the chosen elements.
    """
    from .qalg import _fresh_name
    cover = [c if isinstance(c, Poly) else parse_poly(c, A.vars) for c in cover]
    if not is_unit_ideal(A, cover):
        raise ValueError("cover elements do not generate the unit ideal")
    count = len(cover)
    inv = _fresh_name("y", A.vars)
    levels = []
    level_tuples = []
    for n in range(up_to + 1):
        comps = []
        tuples = _tuple_components(n, count)
        for t in tuples:
            prod = A.one()
            for i in t:
                prod = prod * cover[i]
            loc, _, _ = localize(A, A.normal_form(prod), inv)
            comps.append(loc)
        levels.append(ComponentedAlgebra(comps))
        level_tuples.append(tuples)

    def face_map(n, i):
        src = levels[n]
        dst = levels[n - 1]
        tuples = level_tuples[n]
        dtuples = level_tuples[n - 1]
        comp = []
        alg = []
        for idx, t in enumerate(tuples):
            dt = t[:i] + t[i + 1:]
            di = dtuples.index(dt)
            comp.append(di)
            images = {v: Poly.var(src[idx].vars, v) for v in A.vars}
            # 1/prod(dt) = y * f_{t_i}
            images[inv] = src[idx].normal_form(
                Poly.var(src[idx].vars, inv) *
                cover[t[i]].rename(src[idx].vars, {v: v for v in A.vars}))
            alg.append(AlgebraMap(dst[di], src[idx], images))
        return CAlgMap(src, dst, tuple(comp), tuple(alg))

    def degen_map(n, i):
        src = levels[n]
        dst = levels[n + 1]
        tuples = level_tuples[n]
        utuples = level_tuples[n + 1]
        comp = []
        alg = []
        for idx, t in enumerate(tuples):
            ut = t[:i + 1] + (t[i],) + t[i + 1:]
            ui = utuples.index(ut)
            comp.append(ui)
            images = {v: Poly.var(src[idx].vars, v) for v in A.vars}
            # 1/(prod(t) * f_{t_i}) = y^2 * prod(t without one f_{t_i} copy)
            rest = A.one()
            for j, tj in enumerate(t):
                if j != i:
                    rest = rest * cover[tj]
            images[inv] = src[idx].normal_form(
                Poly.var(src[idx].vars, inv) ** 2 *
                rest.rename(src[idx].vars, {v: v for v in A.vars}))
            alg.append(AlgebraMap(dst[ui], src[idx], images))
        return CAlgMap(src, dst, tuple(comp), tuple(alg))

    face = {(n, i): face_map(n, i) for n in range(1, up_to + 1) for i in range(n + 1)}
    degen = {(n, i): degen_map(n, i) for n in range(up_to) for i in range(n + 1)}
    base = ComponentedAlgebra([A])
    base_map = CAlgMap(
        levels[0], base, (0,) * count,
        tuple(AlgebraMap(A, levels[0][j],
                         {v: Poly.var(levels[0][j].vars, v) for v in A.vars})
              for j in range(count)))
    return AffHypergroupoid(levels, face, degen, coskeletal_above=0,
                            base_map=base_map,
                            component_labels=[list(t) for t in level_tuples])


def cech_auto_certificates(cover: Sequence, A: FPAlgebra, n: int = 1) -> dict:
    """Localization certificates for a Cech nerve, relative to its base.

    Level 0 over Spec A is covered by the f_i themselves; the (1,k)-matching
    maps are localizations at the complementary cover element.
    """
    cover = [c if isinstance(c, Poly) else parse_poly(c, A.vars) for c in cover]
    count = len(cover)
    certs = {(0, 0): CoverCertificate(
        "zariski_localization", {"elements": [str(f) for f in cover]})}
    for k in (0, 1):
        if n < 1:
            break
        elements = []
        for (i0, i1) in itertools.product(range(count), repeat=2):
            other = cover[i1] if k == 0 else cover[i0]
            elements.append(str(other))
        certs[(1, k)] = CoverCertificate("zariski_localization",
                                         {"elements": elements})
    return certs


def constant_stack(A: FPAlgebra, up_to: int = 3) -> AffHypergroupoid:
    """The constant simplicial scheme on Spec A (an affine 0-hypergroupoid)."""
    lv = ComponentedAlgebra([A])
    ident = CAlgMap.identity(lv)
    face = {(n, i): ident for n in range(1, up_to + 1) for i in range(n + 1)}
    degen = {(n, i): ident for n in range(up_to) for i in range(n + 1)}
    return AffHypergroupoid([lv] * (up_to + 1), face, degen, coskeletal_above=0,
                            validate=False)


def glued_two_charts(A0: FPAlgebra, f0: Poly, A1: FPAlgebra, f1: Poly,
                     t01: AlgebraMap, t10: AlgebraMap,
                     up_to: int = 3) -> AffHypergroupoid:
    """cosk_0 of two charts glued along mutually inverse localizations.

    ``t01`` maps loc(A0, f0) to loc(A1, f1) and ``t10`` back; they must be
    mutually inverse isomorphisms.  The overlap component is loc(A0, f0).
    """
    W0 = t01.source
    W1 = t01.target
    if not maps_equal(t01.compose(t10), AlgebraMap.identity(W1)) or \
       not maps_equal(t10.compose(t01), AlgebraMap.identity(W0)):
        raise ValueError("transition maps are not mutually inverse")
    loc0, incl0, _ = localize(A0, f0, "si")
    # identify W0 with loc(A0, f0) presentationally: require identical vars
    if W0.vars != loc0.vars:
        raise ValueError("t01 must be presented on localize(A0, f0)")
    chart_maps = [incl0, t10.compose(
        AlgebraMap(A1, W1, {v: Poly.var(W1.vars, v) for v in A1.vars}))]
    charts = [A0, A1]
    overlap = W0

    levels = []
    tuples_per_level = []
    for n in range(up_to + 1):
        comps = []
        tuples = _tuple_components(n, 2)
        for t in tuples:
            if all(x == t[0] for x in t):
                comps.append(charts[t[0]])
            else:
                comps.append(overlap)
        levels.append(ComponentedAlgebra(comps))
        tuples_per_level.append(tuples)

    def connecting(src_alg, dst_alg, dst_pure: Optional[int], src_pure: Optional[int]):
        """Algebra map dst_alg -> src_alg along a tuple inclusion."""
        if dst_pure is not None and src_pure is not None:
            return AlgebraMap.identity(src_alg)
        if dst_pure is None and src_pure is None:
            return AlgebraMap.identity(overlap)
        # dst is a pure chart, src is the overlap
        return chart_maps[dst_pure]

    def build(n, i, up: bool):
        src = levels[n]
        dst = levels[n + 1] if up else levels[n - 1]
        tuples = tuples_per_level[n]
        dtuples = tuples_per_level[n + 1] if up else tuples_per_level[n - 1]
        comp = []
        alg = []
        for idx, t in enumerate(tuples):
            nt = (t[:i + 1] + (t[i],) + t[i + 1:]) if up else (t[:i] + t[i + 1:])
            di = dtuples.index(nt)
            comp.append(di)
            src_pure = t[0] if all(x == t[0] for x in t) else None
            dst_pure = nt[0] if all(x == nt[0] for x in nt) else None
            alg.append(connecting(src[idx], dst[di], dst_pure, src_pure))
        return CAlgMap(src, dst, tuple(comp), tuple(alg))

    face = {(n, i): build(n, i, False) for n in range(1, up_to + 1)
            for i in range(n + 1)}
    degen = {(n, i): build(n, i, True) for n in range(up_to) for i in range(n + 1)}
    return AffHypergroupoid(levels, face, degen, coskeletal_above=0,
                            component_labels=[list(t) for t in tuples_per_level])


def builtin_p1(up_to: int = 3) -> AffHypergroupoid:
    """The projective line from its two standard charts, t = 1/s."""
    A0 = FPAlgebra(("s",), (), weights={"s": 1})
    A1 = FPAlgebra(("t",), (), weights={"t": -1})
    W0 = FPAlgebra(("s", "si"), ["s*si - 1"], weights={"s": 1, "si": -1})
    W1 = FPAlgebra(("t", "ti"), ["t*ti - 1"], weights={"t": -1, "ti": 1})
    t01 = AlgebraMap(W0, W1, {"s": Poly.var(W1.vars, "ti"),
                              "si": Poly.var(W1.vars, "t")})
    t10 = AlgebraMap(W1, W0, {"t": Poly.var(W0.vars, "si"),
                              "ti": Poly.var(W0.vars, "s")})
    return glued_two_charts(A0, A0.var("s"), A1, A1.var("t"), t01, t10, up_to)


def p1_certificates() -> dict:
    """Localization certificates for the two-chart projective line at n = 1."""
    certs = {}
    # (0,0): X_0 -> point is a smooth surjection of affine charts
    certs[(0, 0)] = CoverCertificate(
        "smooth_standard",
        {"witness": [{"minor_vars": [], "inverse": "1"},
                     {"minor_vars": [], "inverse": "1"}]})
    # (1,k): X_1 -> X_0 via vertex k; each chart is covered by itself (f=1)
    # and the overlap, a localization at the chart coordinate
    certs[(1, 0)] = CoverCertificate(
        "zariski_localization", {"elements": ["1", "s", "t", "1"]})
    certs[(1, 1)] = CoverCertificate(
        "zariski_localization", {"elements": ["1", "t", "s", "1"]})
    return certs


def bgm_weight_basis(level: int, comp_idx: int, w: int) -> list[tuple[int, ...]]:
    """Monomial exponents of norm weight w on the BGm level algebra.

    Exponents are over the variables (u_1, v_1, ..., u_n, v_n); a Laurent
    exponent a_i >= 0 goes to u_i^{a_i}, a_i < 0 to v_i^{-a_i}.
    """
    n = level
    if n == 0:
        return [()] if w == 0 else []
    out = []
    # enumerate b in ZZ^{n+1}, sum b = 0, sum |b| = w
    def rec(i, acc, ssum, sabs):
        if i == n:
            last = -ssum
            if sabs + abs(last) == w:
                b = acc + [last]
                a = list(itertools.accumulate(b[:-1]))
                e = [0] * (2 * n)
                for j, aj in enumerate(a):
                    if aj >= 0:
                        e[2 * j] = aj
                    else:
                        e[2 * j + 1] = -aj
                out.append(tuple(e))
            return
        for bj in range(-(w - sabs), w - sabs + 1):
            rec(i + 1, acc + [bj], ssum + bj, sabs + abs(bj))

    rec(0, [], 0, 0)
    return sorted(set(out))


def builtin_bgm(up_to: int = 3) -> AffHypergroupoid:
    """The classifying stack of the multiplicative group as a 1-hypergroupoid.

    Level n is the n-torus QQ[u_1^{±1},...,u_n^{±1}] with the nerve structure
    maps of the group; the attached weight basis is the norm weight in
    homogeneous coordinates (finite slices; weight 0 is the constants).
    """
    def level_algebra(n):
        vars = tuple(x for j in range(1, n + 1) for x in (f"u{j}", f"v{j}"))
        rels = [f"u{j}*v{j} - 1" for j in range(1, n + 1)]
        return FPAlgebra(vars, rels)

    levels = [ComponentedAlgebra([level_algebra(n)]) for n in range(up_to + 1)]

    def var_images(n_src, fn):
        """Images of level-(n_src) variables (u_j, v_j) under index maps."""
        out = {}
        for j in range(1, n_src + 1):
            out[f"u{j}"], out[f"v{j}"] = fn(j)
        return out

    def face_map(n, i):
        # scheme map X_n -> X_{n-1}; algebra map level(n-1) -> level(n)
        src = levels[n][0]
        dst = levels[n - 1][0]

        def fn(j):
            if i == 0:
                return (src.var(f"u{j + 1}"), src.var(f"v{j + 1}"))
            if i == n:
                return (src.var(f"u{j}"), src.var(f"v{j}"))
            if j < i:
                return (src.var(f"u{j}"), src.var(f"v{j}"))
            if j == i:
                return (src.normal_form(src.var(f"u{j}") * src.var(f"u{j + 1}")),
                        src.normal_form(src.var(f"v{j}") * src.var(f"v{j + 1}")))
            return (src.var(f"u{j + 1}"), src.var(f"v{j + 1}"))

        amap = AlgebraMap(dst, src, var_images(n - 1, fn))
        return CAlgMap(levels[n], levels[n - 1], (0,), (amap,))

    def degen_map(n, i):
        src = levels[n][0]
        dst = levels[n + 1][0]

        def fn(j):
            if j <= i:
                return (src.var(f"u{j}"), src.var(f"v{j}"))
            if j == i + 1:
                return (src.one(), src.one())
            return (src.var(f"u{j - 1}"), src.var(f"v{j - 1}"))

        amap = AlgebraMap(dst, src, var_images(n + 1, fn))
        return CAlgMap(levels[n], levels[n + 1], (0,), (amap,))

    face = {(n, i): face_map(n, i) for n in range(1, up_to + 1) for i in range(n + 1)}
    degen = {(n, i): degen_map(n, i) for n in range(up_to) for i in range(n + 1)}
    return AffHypergroupoid(levels, face, degen, coskeletal_above=1,
                            weight_basis_fn=bgm_weight_basis)


def bgm_certificates() -> dict:
    certs = {(0, 0): CoverCertificate("iso", {})}
    for k in (0, 1):
        certs[(1, k)] = CoverCertificate(
            "smooth_standard",
            {"witness": [{"minor_vars": ["v1"], "inverse": "v1"}]})
    return certs


def builtin_stack(name: str, up_to: int = 3, **kwargs) -> AffHypergroupoid:
    if name == "P1":
        return builtin_p1(up_to)
    if name == "BGm":
        return builtin_bgm(up_to)
    if name == "affine":
        return constant_stack(kwargs["algebra"], up_to)
    if name == "glued_two_charts":
        return glued_two_charts(up_to=up_to, **kwargs)
    raise ValueError(f"unknown builtin stack {name!r}")


# ---------------------------------------------------------------------------
# Cartesian modules and Cech cohomology
# ---------------------------------------------------------------------------


class DescentError(Exception):
    pass


@dataclass
class CartesianModule:
    """A level-0 free module with a descent isomorphism over level 1.

    ``ranks[c]`` and ``gen_weights[c]`` describe the free module over each
    level-0 component; ``omega[c1]`` is an invertible matrix of level-1
    algebra elements from the d_0-pullback to the d_1-pullback basis.
    """

    X: AffHypergroupoid
    ranks: list[int]
    gen_weights: list[tuple[int, ...]]
    omega: list  # per level-1 component: list of rows of Poly

    def rank_at(self, level: int, comp: int) -> int:
        v0 = self.X.ordmap_scheme_map(ss.vertex_map(level, 0))
        return self.ranks[v0.comp[comp]]

    def gen_weights_at(self, level: int, comp: int) -> tuple[int, ...]:
        v0 = self.X.ordmap_scheme_map(ss.vertex_map(level, 0))
        return self.gen_weights[v0.comp[comp]]


def _omega_matrix_poly(M: CartesianModule, c1: int) -> list[list[Poly]]:
    A = M.X.level(1)[c1]
    out = []
    for row in M.omega[c1]:
        out.append([p if isinstance(p, Poly) else parse_poly(p, A.vars)
                    for p in row])
    return out


def _pull_matrix(M: CartesianModule, f_alg: AlgebraMap, mat: list[list[Poly]]):
    return [[f_alg.apply_nf(p) for p in row] for row in mat]


def _mat_mul_poly(A: FPAlgebra, m1, m2):
    rows = len(m1)
    mid = len(m2)
    cols = len(m2[0]) if m2 else 0
    out = [[A.zero() for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = A.zero()
            for k in range(mid):
                acc = acc + m1[i][k] * m2[k][j]
            out[i][j] = A.normal_form(acc)
    return out


def descent_module(X: AffHypergroupoid, ranks: Sequence[int],
                   omega, gen_weights: Optional[Sequence[Sequence[int]]] = None
                   ) -> CartesianModule:
    """Validate a descent datum: sigma^0 omega = id and the cocycle identity
    on every level-2 component."""
    if gen_weights is None:
        gen_weights = [tuple(0 for _ in range(r)) for r in ranks]
    M = CartesianModule(X, list(ranks), [tuple(w) for w in gen_weights], list(omega))
    # sigma^0 pullback of omega must be the identity
    for c0 in range(len(X.level(0))):
        c1 = X.s(0, 0).comp[c0]
        mat = _pull_matrix(M, X.s(0, 0).alg[c0], _omega_matrix_poly(M, c1))
        A0 = X.level(0)[c0]
        r = M.ranks[c0]
        for i in range(r):
            for j in range(r):
                want = A0.one() if i == j else A0.zero()
                if not A0.elements_equal(mat[i][j], want):
                    raise DescentError(f"sigma^0 omega != id at level-0 component {c0}")
    # cocycle on level 2: (d_2^* omega)(d_0^* omega) = d_1^* omega
    for e in range(len(X.level(2))):
        A2 = X.level(2)[e]
        pulls = []
        for i in (0, 1, 2):
            c1 = X.d(2, i).comp[e]
            pulls.append(_pull_matrix(M, X.d(2, i).alg[e],
                                      _omega_matrix_poly(M, c1)))
        lhs = _mat_mul_poly(A2, pulls[2], pulls[0])
        rhs = pulls[1]
        r = len(rhs)
        for i in range(r):
            for j in range(r):
                if not A2.elements_equal(lhs[i][j], rhs[i][j]):
                    raise DescentError(
                        f"cocycle fails on level-2 component {e} at entry ({i},{j})")
    return M


def structure_module(X: AffHypergroupoid) -> CartesianModule:
    ranks = [1] * len(X.level(0))
    omega = [[[X.level(1)[c].one()]] for c in range(len(X.level(1)))]
    return descent_module(X, ranks, omega)


def _weight_basis(X: AffHypergroupoid, level: int, comp: int, w: int):
    if X.weight_basis_fn is not None:
        return X.weight_basis_fn(level, comp, w)
    return monomials_of_weight(X.level(level)[comp], w)


def _expand_in_basis(A: FPAlgebra, p: Poly, basis_index: dict) -> dict[int, Fraction]:
    out = {}
    nf = A.normal_form(p)
    for e, c in nf.terms.items():
        if e not in basis_index:
            raise WindowOverflowError(
                f"monomial {e} escapes the weight window", None)
        out[basis_index[e]] = out.get(basis_index[e], Fraction(0)) + c
    return out


def cech_cosimplicial_slice(X: AffHypergroupoid, M: CartesianModule,
                            top: int, w: int) -> dkab.CosimplicialModule:
    """Weight-w slice of the Cech cosimplicial vector space of M.

    Level n is the direct sum over components of (pullback of M0 to the
    first vertex) (x) weight slice; the 0th coface twists by omega along the
    first edge.
    """
    bases = []  # per level: list of (comp, gen index, exponent)
    index = []
    for nlev in range(top + 1):
        basis = []
        for c in range(len(X.level(nlev))):
            gw = M.gen_weights_at(nlev, c)
            for g, wg in enumerate(gw):
                for e in _weight_basis(X, nlev, c, w - wg):
                    basis.append((c, g, e))
        bases.append(basis)
        index.append({b: i for i, b in enumerate(basis)})

    def coface_matrix(nlev, i):
        # dual of d_i: X_n -> X_{n-1}; maps level n-1 slice to level n slice
        rows = len(bases[nlev])
        cols = len(bases[nlev - 1])
        Mrows = [[Fraction(0)] * cols for _ in range(rows)]
        dmap = X.d(nlev, i)
        for c in range(len(X.level(nlev))):
            A = X.level(nlev)[c]
            csrc = dmap.comp[c]
            twist = None
            if i == 0:
                # the first edge (01) of Delta^nlev
                edge = X.ordmap_scheme_map(OrdinalMap(1, nlev, (0, 1)))
                c1 = edge.comp[c]
                twist = _pull_matrix(M, edge.alg[c], _omega_matrix_poly(M, c1))
            r = M.rank_at(nlev, c)
            gw_src = M.gen_weights_at(nlev - 1, csrc)
            for g in range(len(gw_src)):
                for e in _weight_basis(X, nlev - 1, csrc, w - gw_src[g]):
                    col = index[nlev - 1][(csrc, g, e)]
                    coeff = dmap.alg[c].apply_nf(Poly(X.level(nlev - 1)[csrc].vars,
                                                      {e: Fraction(1)}))
                    if twist is None:
                        vec = _expand_in_basis(A, coeff, {
                            ee: index[nlev][(c, g, ee)]
                            for ee in _weight_basis(X, nlev, c, w - gw_src[g])})
                        for rr, cc in vec.items():
                            Mrows[rr][col] += cc
                    else:
                        for g2 in range(r):
                            entry = A.normal_form(twist[g2][g] * coeff)
                            if entry.is_zero():
                                continue
                            wg2 = M.gen_weights_at(nlev, c)[g2]
                            vec = _expand_in_basis(A, entry, {
                                ee: index[nlev][(c, g2, ee)]
                                for ee in _weight_basis(X, nlev, c, w - wg2)})
                            for rr, cc in vec.items():
                                Mrows[rr][col] += cc
        return Mat(rows, cols, Mrows)

    def codegen_matrix(nlev, i):
        rows = len(bases[nlev])
        cols = len(bases[nlev + 1])
        Mrows = [[Fraction(0)] * cols for _ in range(rows)]
        smap = X.s(nlev, i)
        for c in range(len(X.level(nlev))):
            A = X.level(nlev)[c]
            csrc = smap.comp[c]
            gw_src = M.gen_weights_at(nlev + 1, csrc)
            for g in range(len(gw_src)):
                for e in _weight_basis(X, nlev + 1, csrc, w - gw_src[g]):
                    col = index[nlev + 1][(csrc, g, e)]
                    coeff = smap.alg[c].apply_nf(Poly(X.level(nlev + 1)[csrc].vars,
                                                      {e: Fraction(1)}))
                    vec = _expand_in_basis(A, coeff, {
                        ee: index[nlev][(c, g, ee)]
                        for ee in _weight_basis(X, nlev, c, w - gw_src[g])})
                    for rr, cc in vec.items():
                        Mrows[rr][col] += cc
        return Mat(rows, cols, Mrows)

    coface = {(nlev, i): coface_matrix(nlev, i)
              for nlev in range(1, top + 1) for i in range(nlev + 1)}
    codegen = {(nlev, i): codegen_matrix(nlev, i)
               for nlev in range(top) for i in range(nlev + 1)}
    return dkab.CosimplicialModule(
        "QQ", [len(b) for b in bases], coface, codegen)


def cech_cohomology(X: AffHypergroupoid, M: CartesianModule, max_degree: int,
                    window: tuple[int, int],
                    per_weight: bool = False):
    """Exact Cech cohomology dimensions in degrees 0..max_degree.

    Computed through the full unnormalized nerve levels: the weight-w slice
    of the cosimplicial module is conormalized and its cohomology taken;
    dimensions are summed over the window unless per_weight is set.
    """
    if X.top < max_degree + 1:
        raise ss.InsufficientDataError(
            f"need levels to {max_degree + 1}, stored {X.top}")
    lo, hi = window
    table: dict[int, tuple[int, ...]] = {}
    for w in range(lo, hi + 1):
        cos = cech_cosimplicial_slice(X, M, max_degree + 1, w)
        N = dkab.conormalize(cos)
        table[w] = N.cohomology_dims(max_degree)
    if per_weight:
        return table
    return tuple(sum(table[w][d] for w in table) for d in range(max_degree + 1))


def twisting_module_p1(X: AffHypergroupoid, d: int) -> CartesianModule:
    """The line bundle O(d) on the two-chart projective line.

    Trivialized as e_0 on chart 0 and e_1 on chart 1 with e_1 = s^d e_0 on
    the overlap; omega carries the d_0-pullback to the d_1-pullback."""
    if X.component_labels is None:
        raise ValueError("need component labels (use builtin_p1)")
    omegas = []
    for c, label in enumerate(X.component_labels[1]):
        A = X.level(1)[c]
        i0, i1 = label
        if i0 == i1:
            omegas.append([[A.one()]])
        elif (i0, i1) == (0, 1):
            # from the chart-1 frame (vertex 1) to the chart-0 frame
            power = Poly.var(A.vars, "s") ** d if d >= 0 \
                else Poly.var(A.vars, "si") ** (-d)
            omegas.append([[power]])
        else:
            power = Poly.var(A.vars, "si") ** d if d >= 0 \
                else Poly.var(A.vars, "s") ** (-d)
            omegas.append([[power]])
    return descent_module(X, [1, 1], omegas, gen_weights=[(0,), (d,)])


# ---------------------------------------------------------------------------
# levelwise modules and truncated Cartesianification (discrete case)
# ---------------------------------------------------------------------------


@dataclass
class LevelwiseModule:
    """A (not necessarily Cartesian) module on a discrete hypergroupoid.

    ``dims[n][c]`` is the dimension over component c of level n; comparison
    maps ``cf[(n, i)][c]`` send the fiber at the d_i-image component into the
    fiber at c (a Mat), and similarly ``cd[(n, i)][c]`` for degeneracies.
    """

    X: AffHypergroupoid
    dims: list[list[int]]
    cf: dict
    cd: dict

    def top(self):
        return len(self.dims) - 1


def discrete_groupoid_stack(G: ss.FinGroupoid, up_to: int = 4) -> AffHypergroupoid:
    """The nerve of a finite groupoid as a disjoint-union-of-points stack."""
    N, expr = ss.nerve(G, up_to)
    levels = []
    elems = []
    for n in range(up_to + 1):
        simpl = list(N.simplices(n))
        elems.append(simpl)
        levels.append(ComponentedAlgebra([FPAlgebra.rationals()] * len(simpl)))
    pt = FPAlgebra.rationals()

    def build(n, i, up):
        src = levels[n]
        dst = levels[n + 1] if up else levels[n - 1]
        srcs = elems[n]
        dsts = elems[n + 1] if up else elems[n - 1]
        comp = []
        for x in srcs:
            y = N.degeneracy(x, i) if up else N.face(x, i)
            comp.append(dsts.index(y))
        alg = tuple(AlgebraMap(pt, pt, {}) for _ in srcs)
        return CAlgMap(src, dst, tuple(comp), alg)

    face = {(n, i): build(n, i, False) for n in range(1, up_to + 1)
            for i in range(n + 1)}
    degen = {(n, i): build(n, i, True) for n in range(up_to) for i in range(n + 1)}
    nerve_weight_basis = lambda level, comp, w: [()] if w == 0 else []
    return AffHypergroupoid(levels, face, degen, coskeletal_above=1,
                            weight_basis_fn=nerve_weight_basis)


def rcart_truncated(X: AffHypergroupoid, F: LevelwiseModule, m: int,
                    depth: int) -> dkab.CochainComplex:
    """Truncated derived Cartesianification at level m.

    Builds the conormalized complex of the decalage Cech construction: in
    cosimplicial degree j the sections over X_{j+m+1} of F_j pulled back
    along the iterated forgotten top faces, with the early face/degeneracy
    comparisons of F.  Only discrete (finite etale) levels are supported.
    """
    for lev in X.levels:
        for c in lev.components:
            if c.vars:
                raise NotImplementedError(
                    "rcart_truncated supports discrete hypergroupoids only")
    if X.top < depth + m + 1:
        raise ss.InsufficientDataError(
            f"need levels to {depth + m + 1}, stored {X.top}")

    def top_chain(jlev):
        """Scheme map X_{jlev+m+1} -> X_{jlev}: iterated forgotten top face."""
        f = OrdinalMap(jlev, jlev + m + 1, tuple(range(jlev + 1)))
        return X.ordmap_scheme_map(f)

    bases = []
    index = []
    for j in range(depth + 1):
        chain = top_chain(j)
        basis = []
        for c in range(len(X.level(j + m + 1))):
            csrc = chain.comp[c]
            for g in range(F.dims[j][csrc]):
                basis.append((c, g))
        bases.append(basis)
        index.append({b: i for i, b in enumerate(basis)})

    def coface_matrix(j, i):
        # dual of the Dec face d_i: X_{j+m+1} -> X_{j+m} (i <= j)
        rows = len(bases[j])
        cols = len(bases[j - 1])
        Mr = [[Fraction(0)] * cols for _ in range(rows)]
        dmap = X.d(j + m + 1, i)
        chain_here = top_chain(j)
        chain_prev = top_chain(j - 1)
        for c in range(len(X.level(j + m + 1))):
            cprev = dmap.comp[c]
            csrc = chain_here.comp[c]
            # F's comparison for the face d_i between module levels j-1 -> j
            comp_mat = F.cf[(j, i)][csrc]
            src_comp = chain_prev.comp[cprev]
            for g2 in range(F.dims[j][csrc]):
                for g in range(F.dims[j - 1][src_comp]):
                    if comp_mat[g2, g]:
                        Mr[index[j][(c, g2)]][index[j - 1][(cprev, g)]] += comp_mat[g2, g]
        return Mat(rows, cols, Mr)

    def codegen_matrix(j, i):
        rows = len(bases[j])
        cols = len(bases[j + 1])
        Mr = [[Fraction(0)] * cols for _ in range(rows)]
        smap = X.s(j + m + 1, i)
        chain_here = top_chain(j)
        chain_next = top_chain(j + 1)
        for c in range(len(X.level(j + m + 1))):
            cnext = smap.comp[c]
            csrc = chain_here.comp[c]
            comp_mat = F.cd[(j, i)][csrc]
            src_comp = chain_next.comp[cnext]
            for g2 in range(F.dims[j][csrc]):
                for g in range(F.dims[j + 1][src_comp]):
                    if comp_mat[g2, g]:
                        Mr[index[j][(c, g2)]][index[j + 1][(cnext, g)]] += comp_mat[g2, g]
        return Mat(rows, cols, Mr)

    coface = {(j, i): coface_matrix(j, i) for j in range(1, depth + 1)
              for i in range(j + 1)}
    codegen = {(j, i): codegen_matrix(j, i) for j in range(depth)
               for i in range(j + 1)}
    cos = dkab.CosimplicialModule("QQ", [len(b) for b in bases], coface, codegen,
                                  validate=False)
    return dkab.conormalize(cos)
