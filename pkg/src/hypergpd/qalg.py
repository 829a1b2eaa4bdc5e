"""Exact commutative algebra over QQ: polynomials, Groebner bases, finitely
presented algebras and modules, Kaehler differentials, graded windows.

Coefficients are arbitrary-precision rationals throughout.  The default
monomial order is grevlex; lex (and a two-block elimination order) are used
for elimination.  Groebner bases are reduced and therefore canonical, so
normal forms decide equality.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence


class GroebnerCapExceeded(RuntimeError):
    """Raised when the step cap (HYPERGPD_GROEBNER_CAP) is exhausted."""


class WindowOverflowError(Exception):
    """A graded computation left the finite window."""

    def __init__(self, message, weight=None):
        super().__init__(message)
        self.weight = weight


def _step_cap() -> int:
    return int(os.environ.get("HYPERGPD_GROEBNER_CAP", "2000000"))


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------


def grevlex_key(e: tuple[int, ...]):
    return (sum(e), tuple(-x for x in reversed(e)))


def lex_key(e: tuple[int, ...]):
    return e


def order_key(order: str):
    if order == "grevlex":
        return grevlex_key
    if order == "lex":
        return lex_key
    if order.startswith("elim:"):
        cut = int(order.split(":")[1])

        def key(e):
            return (grevlex_key(e[:cut]), grevlex_key(e[cut:]))

        return key
    raise ValueError(f"unknown monomial order {order!r}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Multivariate polynomial with rational coefficients.

    ``vars`` is the ordered variable tuple (first = biggest for lex);
    ``terms`` maps exponent tuples to nonzero Fractions.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: dict):
        self.vars = tuple(vars)
        self.terms = {tuple(e): Fraction(c) for e, c in terms.items() if c != 0}
        for e in self.terms:
            if len(e) != len(self.vars) or any(x < 0 for x in e):
                raise ValueError("bad exponent vector")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, vars):
        return cls(vars, {})

    @classmethod
    def const(cls, vars, c):
        if c == 0:
            return cls.zero(vars)
        return cls(vars, {(0,) * len(vars): Fraction(c)})

    @classmethod
    def var(cls, vars, name):
        e = [0] * len(vars)
        e[list(vars).index(name)] = 1
        return cls(vars, {tuple(e): Fraction(1)})

    # -- ring operations ----------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError("variable mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
            if out[e] == 0:
                del out[e]
        return Poly(self.vars, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return Poly(self.vars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Poly(self.vars, out)

    def mul_term(self, e2, c2):
        return Poly(self.vars,
                    {tuple(a + b for a, b in zip(e, e2)): c * c2
                     for e, c in self.terms.items()})

    def __pow__(self, k: int):
        out = Poly.const(self.vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(x == 0 for x in e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def leading(self, key):
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def rename(self, new_vars: Sequence[str], mapping: dict[str, str]) -> "Poly":
        """Transport to a new variable tuple via an injective renaming."""
        idx = {v: i for i, v in enumerate(new_vars)}
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for pos, x in enumerate(e):
                if x:
                    ne[idx[mapping[self.vars[pos]]]] = x
            out[tuple(ne)] = c
        return Poly(new_vars, out)

    def substitute(self, target_vars: Sequence[str], images: dict[str, "Poly"]) -> "Poly":
        """Evaluate with each variable replaced by a polynomial in target_vars."""
        out = Poly.zero(target_vars)
        for e, c in self.terms.items():
            term = Poly.const(target_vars, c)
            for pos, x in enumerate(e):
                if x:
                    term = term * images[self.vars[pos]] ** x
            out = out + term
        return out

    def derivative(self, name: str) -> "Poly":
        i = list(self.vars).index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = out.get(tuple(ne), Fraction(0)) + c * e[i]
        return Poly(self.vars, out)

    def weight(self, weights: dict[str, int]) -> Optional[int]:
        """The common weight of all terms, or None if inhomogeneous/zero."""
        ws = {sum(weights[self.vars[i]] * x for i, x in enumerate(e))
              for e in self.terms}
        if len(ws) != 1:
            return None
        return next(iter(ws))

    # -- text ----------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)
        parts = []
        for e, c in items:
            factors = []
            for i, x in enumerate(e):
                if x == 1:
                    factors.append(self.vars[i])
                elif x > 1:
                    factors.append(f"{self.vars[i]}^{x}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    __repr__ = __str__


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9':.|]*)"
                    r"|(?P<op>[\^*+-]))")


def parse_poly(text: str, vars: Sequence[str]) -> Poly:
    """Parse the documented grammar: '2/3*x^2*y - 1', '-s + t^3'."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize {text[pos:]!r} (column {pos})")
        tokens.append((m.lastgroup, m.group(m.lastgroup)))
        pos = m.end()
    out = Poly.zero(vars)
    sign = Fraction(1)
    i = 0
    n = len(tokens)
    while i < n:
        kind, val = tokens[i]
        if kind == "op" and val in "+-":
            sign = Fraction(1 if val == "+" else -1)
            i += 1
            continue
        term = Poly.const(vars, sign)
        sign = Fraction(1)
        while i < n:
            kind, val = tokens[i]
            if kind == "num":
                term = term.scale(Fraction(val))
                i += 1
            elif kind == "name":
                if val not in vars:
                    raise ValueError(f"unknown variable {val!r}")
                exp = 1
                if i + 2 < n and tokens[i + 1] == ("op", "^") and tokens[i + 2][0] == "num":
                    exp = int(tokens[i + 2][1])
                    i += 2
                term = term * Poly.var(vars, val) ** exp
                i += 1
            elif kind == "op" and val == "*":
                i += 1
            else:
                break
        out = out + term
    return out


# ---------------------------------------------------------------------------
# division and Buchberger
# ---------------------------------------------------------------------------


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


def reduce_poly(f: Poly, basis: Sequence[Poly], key, counter=None) -> Poly:
    """Full multivariate division remainder of f by the basis."""
    leads = [(g.leading(key)[0], g.leading(key)[1], g)
             for g in basis if not g.is_zero()]
    rem: dict = {}
    work = dict(f.terms)
    kcache: dict = {}

    def K(e):
        k = kcache.get(e)
        if k is None:
            k = kcache[e] = key(e)
        return k

    while work:
        if counter is not None:
            counter[0] += 1
            if counter[0] > counter[1]:
                raise GroebnerCapExceeded(
                    f"Groebner step cap {counter[1]} exceeded")
        e = max(work, key=K)
        c = work[e]
        hit = None
        for ge, gc, g in leads:
            if _divides(ge, e):
                hit = (ge, gc, g)
                break
        if hit is None:
            rem[e] = rem.get(e, Fraction(0)) + c
            del work[e]
        else:
            ge, gc, g = hit
            shift = tuple(a - b for a, b in zip(e, ge))
            ratio = c / gc
            for me, mc in g.terms.items():
                ne = tuple(a + b for a, b in zip(me, shift))
                work[ne] = work.get(ne, Fraction(0)) - ratio * mc
                if work[ne] == 0:
                    del work[ne]
    return Poly(f.vars, rem)


def groebner_basis(relations: Iterable[Poly], vars: Sequence[str],
                   order: str = "grevlex") -> list[Poly]:
    """Reduced Groebner basis (deterministic for a given order).

    Buchberger with normal pair selection on a heap; coprime pairs are
    skipped and a divisor-with-smaller-lcm criterion prunes the queue.
    """
    import heapq

    key = order_key(order)
    counter = [0, _step_cap()]
    kcache: dict = {}

    def K(e):
        k = kcache.get(e)
        if k is None:
            k = kcache[e] = key(e)
        return k

    def lcm(e1, e2):
        return tuple(max(a, b) for a, b in zip(e1, e2))

    G: list[Poly] = []
    leads: list[tuple] = []
    lcoefs: list[Fraction] = []
    heap: list = []

    def add_poly(p: Poly):
        e, c = p.leading(key)
        p = p.scale(1 / c)
        j = len(G)
        G.append(p)
        leads.append(e)
        lcoefs.append(Fraction(1))
        for i in range(j):
            l = lcm(leads[i], e)
            if l == tuple(a + b for a, b in zip(leads[i], e)):
                continue  # coprime leads: S-polynomial reduces to zero
            heapq.heappush(heap, (K(l), i, j, l))

    initial = sorted((p for p in relations if not p.is_zero()),
                     key=lambda p: K(p.leading(key)[0]))
    for p in initial:
        add_poly(p)

    while heap:
        _, i, j, l = heapq.heappop(heap)
        # lcm criterion: a third divisor with strictly smaller pair lcms
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not _divides(leads[k], l):
                continue
            if K(lcm(leads[i], leads[k])) < K(l) and K(lcm(leads[j], leads[k])) < K(l):
                skip = True
                break
        if skip:
            continue
        s = (G[i].mul_term(tuple(a - b for a, b in zip(l, leads[i])), 1)
             - G[j].mul_term(tuple(a - b for a, b in zip(l, leads[j])), 1))
        r = reduce_poly(s, G, key, counter)
        if not r.is_zero():
            add_poly(r)

    # minimalize: drop elements whose lead is divisible by another lead
    minimal = []
    min_leads = []
    for i in range(len(G)):
        if any(_divides(leads[j], leads[i]) and leads[j] != leads[i]
               for j in range(len(G))):
            continue
        if leads[i] in min_leads:
            continue
        minimal.append(G[i])
        min_leads.append(leads[i])
    # reduce each element against the others
    out = []
    for i, g in enumerate(minimal):
        rest = minimal[:i] + minimal[i + 1:]
        r = reduce_poly(g, rest, key, counter)
        if not r.is_zero():
            out.append(r.scale(1 / r.leading(key)[1]))
    out.sort(key=lambda p: K(p.leading(key)[0]))
    return out


# ---------------------------------------------------------------------------
# finitely presented algebras
# ---------------------------------------------------------------------------


class FPAlgebra:
    """QQ[vars]/(relations) with a cached reduced Groebner basis.

    Optional per-variable integer weights make the algebra graded; all
    relations must then be homogeneous.
    """

    def __init__(self, vars: Sequence[str], relations: Sequence[Poly] = (),
                 order: str = "grevlex", weights: Optional[dict[str, int]] = None):
        self.vars = tuple(vars)
        self.relations = tuple(r if isinstance(r, Poly) else parse_poly(r, self.vars)
                               for r in relations)
        self.order = order
        self.weights = dict(weights) if weights else None
        self._gb: Optional[list[Poly]] = None
        if self.weights is not None:
            for r in self.relations:
                if not r.is_zero() and r.weight(self.weights) is None:
                    raise ValueError(f"inhomogeneous relation {r} for given weights")

    @classmethod
    def rationals(cls) -> "FPAlgebra":
        return cls((), ())

    @classmethod
    def polynomial(cls, *names: str, weights=None) -> "FPAlgebra":
        return cls(names, (), weights=weights)

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self.vars)

    def groebner(self) -> list[Poly]:
        if self._gb is None:
            self._gb = groebner_basis(self.relations, self.vars, self.order)
        return self._gb

    def normal_form(self, f: Poly) -> Poly:
        return reduce_poly(f, self.groebner(), order_key(self.order))

    def is_zero_ring(self) -> bool:
        g = self.groebner()
        return len(g) == 1 and g[0].is_constant() and not g[0].is_zero()

    def elements_equal(self, f: Poly, g: Poly) -> bool:
        return self.normal_form(f - g).is_zero()

    def zero(self) -> Poly:
        return Poly.zero(self.vars)

    def one(self) -> Poly:
        return Poly.const(self.vars, 1)

    def var(self, name) -> Poly:
        return Poly.var(self.vars, name)

    def standard_monomial(self, e) -> bool:
        key = order_key(self.order)
        return not any(_divides(g.leading(key)[0], e) for g in self.groebner())

    def __repr__(self):
        rel = ", ".join(str(r) for r in self.relations)
        return f"FPAlgebra[{', '.join(self.vars)}; {rel}]"


def ideal_membership(f: Poly, A: FPAlgebra) -> bool:
    return A.normal_form(f).is_zero()


def is_unit_ideal(A: FPAlgebra, extra: Sequence[Poly] = ()) -> bool:
    """True when 1 lies in the defining ideal extended by ``extra``."""
    if not extra:
        return A.is_zero_ring()
    B = FPAlgebra(A.vars, tuple(A.relations) + tuple(extra), A.order)
    return B.is_zero_ring()


class AlgebraMap:
    """A ring map between finitely presented algebras, given on variables."""

    __slots__ = ("source", "target", "images")

    def __init__(self, source: FPAlgebra, target: FPAlgebra, images: dict,
                 validate: bool = True):
        self.source = source
        self.target = target
        self.images = dict(images)
        if validate:
            for v in self.source.vars:
                if v not in self.images:
                    raise ValueError(f"missing image for {v}")
            for r in self.source.relations:
                if not self.target.normal_form(self.apply(r)).is_zero():
                    raise ValueError(f"relation {r} not sent to zero")

    def apply(self, f: Poly) -> Poly:
        return f.substitute(self.target.vars, self.images)

    def apply_nf(self, f: Poly) -> Poly:
        return self.target.normal_form(self.apply(f))

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """self after other."""
        images = {v: self.apply_nf(other.images[v]) for v in other.source.vars}
        return AlgebraMap(other.source, self.target, images, validate=False)

    @classmethod
    def identity(cls, A: FPAlgebra) -> "AlgebraMap":
        return cls(A, A, {v: A.var(v) for v in A.vars}, validate=False)


def maps_equal(f: AlgebraMap, g: AlgebraMap) -> bool:
    return all(f.target.elements_equal(f.images[v], g.images[v])
               for v in f.source.vars)


# -- pushouts and localizations ----------------------------------------------


def _merge_weights(wa, wb):
    if wa is None and wb is None:
        return None
    out = {}
    out.update(wa or {})
    out.update(wb or {})
    return out


def pushout_algebra(f: AlgebraMap, g: AlgebraMap,
                    rename_a: str = "", rename_b: str = "'"):
    """A tensor B over R for f: R -> A, g: R -> B.

    Returns (C, incl_A, incl_B).  Variables keep their names when disjoint;
    clashes in B get the ``rename_b`` suffix.
    """
    A, B, R = f.target, g.target, f.source
    if g.source is not R and g.source.vars != R.vars:
        raise ValueError("maps must share their source")
    a_names = {v: v + rename_a for v in A.vars}
    taken = set(a_names.values())
    b_names = {}
    for v in B.vars:
        nv = v
        while nv in taken:
            nv = nv + rename_b
        b_names[v] = nv
        taken.add(nv)
    cvars = tuple(a_names[v] for v in A.vars) + tuple(b_names[v] for v in B.vars)
    wa = {a_names[v]: A.weights[v] for v in A.vars} if A.weights else None
    wb = {b_names[v]: B.weights[v] for v in B.vars} if B.weights else None
    rels = [r.rename(cvars, a_names) for r in A.relations]
    rels += [r.rename(cvars, b_names) for r in B.relations]
    for v in R.vars:
        rels.append(f.images[v].rename(cvars, a_names)
                    - g.images[v].rename(cvars, b_names))
    C = FPAlgebra(cvars, rels, weights=_merge_weights(wa, wb))
    incl_a = AlgebraMap(A, C, {v: Poly.var(cvars, a_names[v]) for v in A.vars})
    incl_b = AlgebraMap(B, C, {v: Poly.var(cvars, b_names[v]) for v in B.vars})
    return C, incl_a, incl_b


def tensor_over_rationals(A: FPAlgebra, B: FPAlgebra):
    R = FPAlgebra.rationals()
    return pushout_algebra(AlgebraMap(R, A, {}), AlgebraMap(R, B, {}))


def localize(A: FPAlgebra, f: Poly, inv_name: Optional[str] = None):
    """A[y]/(y f - 1); returns (localized algebra, map from A, inverse var)."""
    if A.normal_form(f).is_zero():
        raise ValueError("cannot invert zero")
    name = inv_name or _fresh_name("inv", A.vars)
    cvars = A.vars + (name,)
    weights = None
    if A.weights is not None:
        wf = f.weight(A.weights)
        if wf is None:
            raise ValueError("cannot grade the localization of an inhomogeneous element")
        weights = dict(A.weights)
        weights[name] = -wf
    rels = [r.rename(cvars, {v: v for v in A.vars}) for r in A.relations]
    rels.append(f.rename(cvars, {v: v for v in A.vars}) * Poly.var(cvars, name)
                - Poly.const(cvars, 1))
    L = FPAlgebra(cvars, rels, weights=weights)
    incl = AlgebraMap(A, L, {v: Poly.var(cvars, v) for v in A.vars})
    return L, incl, name


def _fresh_name(base: str, taken: Sequence[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


# -- map inversion via elimination -------------------------------------------


def preimage_polynomial(phi: AlgebraMap, target_elt: Poly) -> Optional[Poly]:
    """A polynomial p over the source with phi(p) = target_elt, or None.

    Works in QQ[target vars, y_sourcevars] with the graph ideal and a
    two-block elimination order.
    """
    A, B = phi.source, phi.target
    yn = {v: _fresh_name("y_" + v, B.vars) for v in A.vars}
    allvars = tuple(B.vars) + tuple(yn[v] for v in A.vars)
    cut = len(B.vars)
    rels = [r.rename(allvars, {v: v for v in B.vars}) for r in B.relations]
    for v in A.vars:
        rels.append(phi.images[v].rename(allvars, {w: w for w in B.vars})
                    - Poly.var(allvars, yn[v]))
    gb = groebner_basis(rels, allvars, order=f"elim:{cut}")
    key = order_key(f"elim:{cut}")
    nf = reduce_poly(target_elt.rename(allvars, {v: v for v in B.vars}), gb, key)
    if any(any(e[i] for i in range(cut)) for e in nf.terms):
        return None
    back = {yn[v]: v for v in A.vars}
    mapping = {w: back.get(w, w) for w in allvars}
    proj = {w: (Poly.var(A.vars, mapping[w]) if mapping[w] in A.vars
                else Poly.zero(A.vars)) for w in allvars}
    return nf.substitute(A.vars, proj)


def inverse_algebra_map(phi: AlgebraMap) -> Optional[AlgebraMap]:
    """A two-sided inverse of phi, or None when phi is not an isomorphism."""
    images = {}
    for v in phi.target.vars:
        p = preimage_polynomial(phi, phi.target.var(v))
        if p is None:
            return None
        images[v] = p
    try:
        psi = AlgebraMap(phi.target, phi.source, images)
    except ValueError:
        return None
    if not maps_equal(psi.compose(phi), AlgebraMap.identity(phi.source)):
        return None
    if not maps_equal(phi.compose(psi), AlgebraMap.identity(phi.target)):
        return None
    return psi


# ---------------------------------------------------------------------------
# finitely presented modules
# ---------------------------------------------------------------------------


class FPModule:
    """Cokernel presentation over an FPAlgebra.

    ``gens`` are generator names, optionally weighted; ``relations`` is a
    list of generator-indexed Poly vectors.
    """

    def __init__(self, over: FPAlgebra, gens: Sequence[str],
                 relations: Sequence[Sequence[Poly]] = (),
                 gen_weights: Optional[Sequence[int]] = None):
        self.over = over
        self.gens = tuple(gens)
        self.relations = tuple(tuple(over.normal_form(p) for p in row)
                               for row in relations)
        for row in self.relations:
            if len(row) != len(self.gens):
                raise ValueError("relation length mismatch")
        self.gen_weights = tuple(gen_weights) if gen_weights is not None else None

    def rank_upper_bound(self) -> int:
        return len(self.gens)

    def is_zero(self) -> bool:
        """Fitting-ideal test: the cokernel vanishes iff the ideal of maximal
        minors of the relation matrix is the unit ideal."""
        if not self.gens:
            return True
        if self.over.is_zero_ring():
            return True
        g = len(self.gens)
        if len(self.relations) < g:
            return False
        minors = []
        for rows in itertools.combinations(range(len(self.relations)), g):
            m = [[self.relations[r][c] for c in range(g)] for r in rows]
            minors.append(poly_det(m, self.over.vars))
        return is_unit_ideal(self.over, minors)

    def __repr__(self):
        return f"FPModule(gens={self.gens}, rels={len(self.relations)})"


def poly_det(m: list[list[Poly]], vars) -> Poly:
    n = len(m)
    if n == 0:
        return Poly.const(vars, 1)
    if n == 1:
        return m[0][0]
    out = Poly.zero(vars)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * poly_det(minor, vars)
        out = out + (term if j % 2 == 0 else -term)
    return out


def kaehler(phi: AlgebraMap) -> FPModule:
    """Relative Kaehler differentials of phi: R -> A, Jacobian presentation.

    Generators d<x> for the A-variables; relations are the total differentials
    of the A-relations and of the images of the R-variables.
    """
    A = phi.target
    gens = tuple(f"d{v}" for v in A.vars)
    rels = []
    for r in A.relations:
        rels.append(tuple(A.normal_form(r.derivative(v)) for v in A.vars))
    for v in phi.source.vars:
        img = phi.images[v]
        rels.append(tuple(A.normal_form(img.derivative(w)) for w in A.vars))
    weights = None
    if A.weights is not None:
        weights = tuple(A.weights[v] for v in A.vars)
    return FPModule(A, gens, rels, gen_weights=weights)


# ---------------------------------------------------------------------------
# graded windows
# ---------------------------------------------------------------------------


@dataclass
class LaurentStructure:
    """Monomial structure of algebras presented by u*v = 1 pairs.

    ``directions`` lists ("pair", u_index, v_index) and ("free", index)
    entries; standard monomials are exactly the products of one power per
    direction (integral for pairs, nonnegative for frees).
    """

    algebra: FPAlgebra
    directions: list[tuple]

    def weight_of_direction(self, d) -> Optional[int]:
        w = self.algebra.weights
        if w is None:
            return None
        if d[0] == "free":
            return w[self.algebra.vars[d[1]]]
        return w[self.algebra.vars[d[1]]]

    def exponent_to_monomial(self, exps: Sequence[int]) -> tuple[int, ...]:
        e = [0] * len(self.algebra.vars)
        for d, k in zip(self.directions, exps):
            if d[0] == "free":
                if k < 0:
                    raise ValueError("negative power of a free variable")
                e[d[1]] = k
            else:
                if k >= 0:
                    e[d[1]] = k
                else:
                    e[d[2]] = -k
        return tuple(e)


def laurent_structure(A: FPAlgebra) -> Optional[LaurentStructure]:
    """Recognize algebras whose reduced basis is a set of u*v - 1 relations."""
    gb = A.groebner()
    used = set()
    pairs = []
    for g in gb:
        terms = sorted(g.terms.items(), key=lambda t: grevlex_key(t[0]))
        if len(terms) != 2:
            return None
        (e_small, c_small), (e_big, c_big) = terms
        if any(e_small):
            return None
        if c_big != 1 or c_small != -1:  # reduced basis element must be u*v - 1
            return None
        nz = [i for i, x in enumerate(e_big) if x]
        if len(nz) != 2 or any(e_big[i] != 1 for i in nz):
            return None
        if nz[0] in used or nz[1] in used:
            return None
        used.update(nz)
        pairs.append(tuple(nz))
    dirs: list[tuple] = []
    for (i, j) in pairs:
        if A.weights is not None:
            wi = A.weights[A.vars[i]]
            wj = A.weights[A.vars[j]]
            if wi + wj != 0:
                return None
        dirs.append(("pair", i, j))
    for i, v in enumerate(A.vars):
        if i not in used:
            dirs.append(("free", i))
    return LaurentStructure(A, dirs)


def monomials_of_weight(A: FPAlgebra, w: int) -> list[tuple[int, ...]]:
    """Standard monomials of the given weight; raises when the slice is not
    provably finite."""
    if A.weights is None:
        raise WindowOverflowError("algebra carries no weights", w)
    ls = laurent_structure(A)
    if ls is None:
        raise WindowOverflowError(
            "weight slices only enumerable for Laurent-type presentations", w)
    dirs = ls.directions
    wts = []
    for d in dirs:
        dw = A.weights[A.vars[d[1]]]
        if dw == 0:
            raise WindowOverflowError("zero-weight direction gives infinite slices", w)
        wts.append(dw)
    n_pairs = sum(1 for d in dirs if d[0] == "pair")
    free_signs = {1 if A.weights[A.vars[d[1]]] > 0 else -1
                  for d in dirs if d[0] == "free"}
    if n_pairs > 1 or (n_pairs == 1 and len(free_signs) > 0) or len(free_signs) > 1:
        raise WindowOverflowError("weight slice is infinite", w)

    out = []

    def rec(i, acc, remaining):
        if i == len(dirs):
            if remaining == 0:
                out.append(ls.exponent_to_monomial(acc))
            return
        d, dw = dirs[i], wts[i]
        if d[0] == "pair":
            if remaining % dw == 0:
                rec(i + 1, acc + [remaining // dw], 0)
            return
        k = 0
        while True:
            rest = remaining - k * dw
            # all later directions have the same sign as dw here
            if (dw > 0 and rest < 0) or (dw < 0 and rest > 0):
                break
            rec(i + 1, acc + [k], rest)
            k += 1

    rec(0, [], w)
    return sorted(out)


@dataclass
class WindowSlice:
    weight: int
    basis: list[tuple[str, tuple[int, ...]]]  # (generator, monomial exponent)
    relations: list[list[Fraction]]  # rows in the basis coordinates
    dimension: int


def graded_window(M: FPModule, window: tuple[int, int]) -> dict[int, WindowSlice]:
    """Finite presentations of the weight slices of a graded module."""
    A = M.over
    if A.weights is None:
        raise WindowOverflowError("algebra carries no weights")
    if M.gen_weights is None:
        raise WindowOverflowError("module generators carry no weights")
    rel_weights = []
    for row in M.relations:
        ws = set()
        for j, p in enumerate(row):
            if p.is_zero():
                continue
            pw = p.weight(A.weights)
            if pw is None:
                raise ValueError(f"inhomogeneous relation entry {p}")
            ws.add(pw + M.gen_weights[j])
        if len(ws) > 1:
            raise ValueError("relation mixes weights")
        rel_weights.append(next(iter(ws)) if ws else None)

    lo, hi = window
    out = {}
    for w in range(lo, hi + 1):
        basis = []
        for j, g in enumerate(M.gens):
            for mono in monomials_of_weight(A, w - M.gen_weights[j]):
                basis.append((g, mono))
        index = {b: i for i, b in enumerate(basis)}
        rows = []
        for row, rw in zip(M.relations, rel_weights):
            if rw is None:
                continue
            for mono in monomials_of_weight(A, w - rw):
                vec = [Fraction(0)] * len(basis)
                mpoly = Poly(A.vars, {mono: Fraction(1)})
                for j, p in enumerate(row):
                    if p.is_zero():
                        continue
                    prod = A.normal_form(p * mpoly)
                    for e, c in prod.terms.items():
                        vec[index[(M.gens[j], e)]] += c
                rows.append(vec)
        from .linalg import Mat
        rank = Mat(len(rows), len(basis), rows).rank() if rows and basis else 0
        out[w] = WindowSlice(w, basis, rows, len(basis) - rank)
    return out


# ---------------------------------------------------------------------------
# exact generic rank over Laurent-type domains
# ---------------------------------------------------------------------------


def _laurent_terms(ls: LaurentStructure, p: Poly) -> dict[tuple[int, ...], Fraction]:
    """Normal-form polynomial as a Laurent polynomial in the directions."""
    out: dict[tuple[int, ...], Fraction] = {}
    for e, c in p.terms.items():
        key = []
        for d in ls.directions:
            if d[0] == "free":
                key.append(e[d[1]])
            else:
                key.append(e[d[1]] - e[d[2]])
        out[tuple(key)] = out.get(tuple(key), Fraction(0)) + c
    return {k: v for k, v in out.items() if v != 0}


def _lt_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


def _lt_sub(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) - c
        if out[e] == 0:
            del out[e]
    return out


def _lt_exact_div(a, b):
    """Exact division of Laurent polynomials; raises if not a multiple."""
    if not b:
        raise ZeroDivisionError
    if not a:
        return {}
    nvars = len(next(iter(b)))
    key = grevlex_key
    # shift both to nonnegative exponents
    shift_a = tuple(-min((e[i] for e in a), default=0) for i in range(nvars))
    shift_b = tuple(-min((e[i] for e in b), default=0) for i in range(nvars))
    A = {tuple(x + s for x, s in zip(e, shift_a)): c for e, c in a.items()}
    B = {tuple(x + s for x, s in zip(e, shift_b)): c for e, c in b.items()}
    blead = max(B, key=key)
    q: dict[tuple[int, ...], Fraction] = {}
    rem = dict(A)
    while rem:
        alead = max(rem, key=key)
        diff = tuple(x - y for x, y in zip(alead, blead))
        if any(d < 0 for d in diff):
            raise ArithmeticError("inexact Laurent division")
        coef = rem[alead] / B[blead]
        q[diff] = coef
        rem = _lt_sub(rem, _lt_mul({diff: coef}, B))
    # undo shifts: q corresponds to exponent offset shift_b - shift_a
    return {tuple(x - sa + sb for x, sa, sb in zip(e, shift_a, shift_b)): c
            for e, c in q.items()}


def generic_rank(A: FPAlgebra, matrix: Sequence[Sequence[Poly]]) -> int:
    """Rank over the fraction field of a Laurent-type domain (exact Bareiss)."""
    ls = laurent_structure(A)
    if ls is None:
        raise ValueError("generic_rank needs a Laurent-type presentation")
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    m = [[_laurent_terms(ls, A.normal_form(p)) for p in row] for row in matrix]
    rank = 0
    prev = {(0,) * len(ls.directions): Fraction(1)}
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                num = _lt_sub(_lt_mul(m[r][c], m[i][j]), _lt_mul(m[i][c], m[r][j]))
                m[i][j] = _lt_exact_div(num, prev) if num else {}
            m[i][c] = {}
        prev = m[r][c]
        rank += 1
        r += 1
    return rank
