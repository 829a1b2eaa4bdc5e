"""Finite simplicial sets, horns, matching objects and hypergroupoid checks.

A finite simplicial set is stored by its nondegenerate simplices only.  A
general simplex is a pair ``(word, base)`` where ``base`` is the id of a
nondegenerate simplex and ``word`` is a degeneracy word in Eilenberg-Zilber
normal form: a strictly decreasing tuple ``(i_1 > i_2 > ... > i_k)`` standing
for the operator ``s_{i_1} s_{i_2} ... s_{i_k}``.  All face and degeneracy
computations reduce to the simplicial identities

    d_i d_j = d_{j-1} d_i          (i < j)
    s_i s_j = s_{j+1} s_i          (i <= j)
    d_i s_j = s_{j-1} d_i          (i < j)
    d_i s_j = id                   (i = j, j+1)
    d_i s_j = s_j d_{i-1}          (i > j+1)

applied to the stored face records of nondegenerate simplices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

Simplex = tuple[tuple[int, ...], str]  # (degeneracy word, nondegenerate base id)


class InsufficientDataError(Exception):
    """A computation needs simplicial levels that are not stored."""


# ---------------------------------------------------------------------------
# ordinal maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrdinalMap:
    """A weakly monotone map [src] -> [dst] in the simplex category."""

    src: int
    dst: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.src + 1:
            raise ValueError("values must have length src+1")
        if any(v < 0 or v > self.dst for v in self.values):
            raise ValueError("value out of range")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be weakly monotone")

    @classmethod
    def identity(cls, n: int) -> "OrdinalMap":
        return cls(n, n, tuple(range(n + 1)))

    @classmethod
    def coface(cls, n: int, i: int) -> "OrdinalMap":
        """delta^i : [n-1] -> [n], the injection missing i."""
        return cls(n - 1, n, tuple(v for v in range(n + 1) if v != i))

    @classmethod
    def codegeneracy(cls, n: int, i: int) -> "OrdinalMap":
        """sigma^i : [n+1] -> [n], hitting i twice."""
        return cls(n + 1, n, tuple(min(v, n) for v in range(n + 2)) if i == n
                   else tuple(v if v <= i else v - 1 for v in range(n + 2)))

    def compose(self, other: "OrdinalMap") -> "OrdinalMap":
        """self after other (other first)."""
        if other.dst != self.src:
            raise ValueError("not composable")
        return OrdinalMap(other.src, self.dst, tuple(self.values[v] for v in other.values))

    def is_identity(self) -> bool:
        return self.src == self.dst and self.values == tuple(range(self.src + 1))


def vertex_map(n: int, v: int) -> OrdinalMap:
    """[0] -> [n] hitting the vertex v."""
    return OrdinalMap(0, n, (v,))


# ---------------------------------------------------------------------------
# degeneracy word arithmetic
# ---------------------------------------------------------------------------


def word_insert(word: tuple[int, ...], i: int) -> tuple[int, ...]:
    """Normal form of s_i composed after the normal-form word."""
    if not word or i > word[0]:
        return (i,) + word
    # s_i s_j = s_{j+1} s_i for i <= j
    return (word[0] + 1,) + word_insert(word[1:], i)


def word_apply_face(word: tuple[int, ...], i: int):
    """Push d_i through a degeneracy word.

    Returns either ("word", new_word) when d_i cancels inside the word, or
    ("face", new_word, j) meaning the result is s_{new_word} d_j applied to
    the base.
    """
    if not word:
        return ("face", (), i)
    j = word[0]
    if i < j:
        res = word_apply_face(word[1:], i)
        if res[0] == "word":
            return ("word", (j - 1,) + res[1])
        return ("face", word_insert(res[1], j - 1), res[2])
    if i == j or i == j + 1:
        return ("word", word[1:])
    res = word_apply_face(word[1:], i - 1)
    if res[0] == "word":
        return ("word", (j,) + res[1])
    return ("face", word_insert(res[1], j), res[2])


# ---------------------------------------------------------------------------
# finite simplicial sets
# ---------------------------------------------------------------------------


class FinSSet:
    """A finite simplicial set given by nondegenerate-simplex tables.

    ``cells[n]`` lists the ids of nondegenerate n-simplices; ``faces[c][i]``
    is the i-th face of the nondegenerate cell ``c`` as a ``(word, base)``
    pair.  The object is complete: levels above ``top_dim`` consist of
    degenerate simplices only.
    """

    def __init__(self, cells: dict[int, Sequence[str]],
                 faces: dict[str, Sequence[Simplex]],
                 validate: bool = True):
        self.cells = {n: tuple(v) for n, v in sorted(cells.items()) if v}
        self.faces = {c: tuple((tuple(w), t) for (w, t) in fs) for c, fs in faces.items()}
        self.top_dim = max(self.cells) if self.cells else -1
        self.dim_of = {c: n for n, cs in self.cells.items() for c in cs}
        self._simplex_cache: dict[int, tuple[Simplex, ...]] = {}
        self._face_cache: dict[tuple[Simplex, int], Simplex] = {}
        if validate:
            self.validate()

    # -- structure ---------------------------------------------------------

    def nondeg(self, n: int) -> tuple[str, ...]:
        return self.cells.get(n, ())

    def all_nondeg(self):
        for n in sorted(self.cells):
            for c in self.cells[n]:
                yield n, c

    def dim(self, x: Simplex) -> int:
        word, base = x
        return self.dim_of[base] + len(word)

    def simplices(self, n: int) -> tuple[Simplex, ...]:
        """All n-simplices, degenerate ones included."""
        if n < 0:
            return ()
        if n not in self._simplex_cache:
            out = []
            for d in range(min(n, self.top_dim) + 1):
                for base in self.nondeg(d):
                    for word in degeneracy_words(d, n - d):
                        out.append((word, base))
            self._simplex_cache[n] = tuple(out)
        return self._simplex_cache[n]

    def face(self, x: Simplex, i: int) -> Simplex:
        key = (x, i)
        cached = self._face_cache.get(key)
        if cached is not None:
            return cached
        word, base = x
        n = self.dim(x)
        if n == 0 or not 0 <= i <= n:
            raise ValueError(f"face index {i} out of range for dimension {n}")
        res = word_apply_face(word, i)
        if res[0] == "word":
            out = (res[1], base)
        else:
            _, outer, j = res
            fw, ft = self.faces[base][j]
            w = fw
            for k in reversed(outer):
                w = word_insert(w, k)
            out = (w, ft)
        self._face_cache[key] = out
        return out

    def degeneracy(self, x: Simplex, i: int) -> Simplex:
        word, base = x
        n = self.dim(x)
        if not 0 <= i <= n:
            raise ValueError(f"degeneracy index {i} out of range for dimension {n}")
        return (word_insert(word, i), base)

    def apply_ordmap(self, x: Simplex, f: OrdinalMap) -> Simplex:
        """Contravariant action: restrict the f.dst-simplex x along f."""
        if self.dim(x) != f.dst:
            raise ValueError("dimension mismatch")
        if f.is_identity():
            return x
        vals = f.values
        for j in range(f.src):
            if vals[j] == vals[j + 1]:
                smaller = OrdinalMap(f.src - 1, f.dst, vals[:j] + vals[j + 1:])
                return self.degeneracy(self.apply_ordmap(x, smaller), j)
        missing = max(v for v in range(f.dst + 1) if v not in vals)
        smaller = OrdinalMap(f.src, f.dst - 1,
                             tuple(v if v < missing else v - 1 for v in vals))
        return self.apply_ordmap(self.face(x, missing), smaller)

    def boundary_tuple(self, x: Simplex) -> tuple[Simplex, ...]:
        n = self.dim(x)
        return tuple(self.face(x, i) for i in range(n + 1))

    # -- validation ---------------------------------------------------------

    def validate(self):
        for c, fs in self.faces.items():
            n = self.dim_of[c]
            if len(fs) != n + 1:
                raise ValueError(f"cell {c} of dim {n} must have {n + 1} faces")
            for w, t in fs:
                if t not in self.dim_of:
                    raise ValueError(f"face target {t} unknown")
                if any(a <= b for a, b in zip(w, w[1:])):
                    raise ValueError(f"degeneracy word {w} not strictly decreasing")
                if self.dim_of[t] + len(w) != n - 1:
                    raise ValueError(f"face of {c} has wrong dimension")
        for n, cs in self.cells.items():
            if n < 2:
                continue
            for c in cs:
                x: Simplex = ((), c)
                for j in range(1, n + 1):
                    for i in range(j):
                        left = self.face(self.face(x, j), i)
                        right = self.face(self.face(x, i), j - 1)
                        if left != right:
                            raise ValueError(
                                f"simplicial identity d_{i} d_{j} fails on {c}")

    # -- misc ----------------------------------------------------------------

    def size_vector(self, up_to: Optional[int] = None) -> tuple[int, ...]:
        top = self.top_dim if up_to is None else up_to
        return tuple(len(self.simplices(n)) for n in range(top + 1))

    def __repr__(self):
        counts = {n: len(cs) for n, cs in self.cells.items()}
        return f"FinSSet(nondeg={counts})"


def degeneracy_words(base_dim: int, k: int) -> list[tuple[int, ...]]:
    """All normal-form degeneracy words of length k on a base of dimension d."""
    if k == 0:
        return [()]
    out = []

    def rec(prefix, remaining, max_allowed):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        # next index must be < prefix[-1] (strict decrease) and fit the dim
        hi = min(max_allowed, (prefix[-1] - 1) if prefix else max_allowed)
        for i in range(hi, -1, -1):
            rec(prefix + [i], remaining - 1, max_allowed - 1)

    rec([], k, base_dim + k - 1)
    return out


# ---------------------------------------------------------------------------
# truncated simplicial sets
# ---------------------------------------------------------------------------


class TruncatedSSet:
    """A simplicial set stored up to a level, with optional coskeletal tail.

    Levels above the stored top are available only when ``coskeletal_above``
    is set, in which case they are generated by the coskeleton; otherwise
    access fails loudly.
    """

    def __init__(self, data: FinSSet, coskeletal_above: Optional[int] = None,
                 validate: bool = True):
        self.data = data
        self.coskeletal_above = coskeletal_above
        if validate and coskeletal_above is not None:
            c = coskeletal_above
            if c < 0:
                raise ValueError("coskeletal_above must be >= 0")
            if c < data.top_dim:
                recon = coskeleton(TruncatedSSet(restrict_to_skeleton(data, c)),
                                   c, data.top_dim)
                for m in range(c + 1, data.top_dim + 1):
                    if len(recon.data.simplices(m)) != len(data.simplices(m)):
                        raise ValueError(
                            f"stored level {m} disagrees with cosk_{c}")

    @property
    def top_dim(self) -> int:
        return self.data.top_dim

    def has_level(self, m: int) -> bool:
        return m <= self.data.top_dim or self.coskeletal_above is not None

    def materialized(self, up_to: int) -> FinSSet:
        """The underlying FinSSet with levels at least up to ``up_to``."""
        if up_to <= self.data.top_dim:
            return self.data
        if self.coskeletal_above is None:
            raise InsufficientDataError(
                f"levels above {self.data.top_dim} not stored and no coskeletal flag")
        return coskeleton(TruncatedSSet(self.data), self.coskeletal_above, up_to).data

    def __repr__(self):
        return f"TruncatedSSet({self.data!r}, coskeletal_above={self.coskeletal_above})"


def as_finsset(X, up_to: int) -> FinSSet:
    """Materialize levels <= up_to from a FinSSet or TruncatedSSet."""
    if isinstance(X, FinSSet):
        return X
    return X.materialized(up_to)


def restrict_to_skeleton(K: FinSSet, c: int) -> FinSSet:
    cells = {n: cs for n, cs in K.cells.items() if n <= c}
    keep = {cid for cs in cells.values() for cid in cs}
    faces = {cid: fs for cid, fs in K.faces.items() if cid in keep}
    return FinSSet(cells, faces, validate=False)


# ---------------------------------------------------------------------------
# standard complexes
# ---------------------------------------------------------------------------


def _subset_id(vertices: Iterable[int]) -> str:
    return ".".join(str(v) for v in vertices)


def _simplex_tables(n: int, omit: set[frozenset]) -> FinSSet:
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    for d in range(n + 1):
        for sub in itertools.combinations(range(n + 1), d + 1):
            if frozenset(sub) in omit:
                continue
            cid = _subset_id(sub)
            cells.setdefault(d, []).append(cid)
            if d > 0:
                faces[cid] = [((), _subset_id(sub[:i] + sub[i + 1:]))
                              for i in range(d + 1)]
    return FinSSet(cells, faces, validate=False)


def standard_complex(kind: str, n: int, k: Optional[int] = None) -> FinSSet:
    """Delta^n, its boundary, or the horn Lambda^n_k.

    Nondegenerate cells are identified by their vertex subsets of {0..n}
    ("0.2.3" style).  By convention the boundary of Delta^0 and the horn
    Lambda^0_0 are the empty simplicial set.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if kind == "delta":
        return _simplex_tables(n, set())
    if kind == "boundary":
        return _simplex_tables(n, {frozenset(range(n + 1))})
    if kind == "horn":
        if k is None or not 0 <= k <= n:
            raise ValueError(f"invalid horn index {k} for dimension {n}")
        full = frozenset(range(n + 1))
        return _simplex_tables(n, {full, full - {k}})
    raise ValueError(f"unknown standard complex kind {kind!r}")


def delta(n: int) -> FinSSet:
    return standard_complex("delta", n)


def boundary(n: int) -> FinSSet:
    return standard_complex("boundary", n)


def horn(n: int, k: int) -> FinSSet:
    return standard_complex("horn", n, k)


def cell_inclusion_map(cell_id: str, m: int) -> OrdinalMap:
    """The ordinal injection picking out a vertex-subset cell of Delta^m."""
    verts = tuple(int(v) for v in cell_id.split("."))
    return OrdinalMap(len(verts) - 1, m, verts)


# ---------------------------------------------------------------------------
# simplicial maps
# ---------------------------------------------------------------------------


class SMap:
    """A simplicial map, recorded on nondegenerate source simplices."""

    def __init__(self, source: FinSSet, target, images: dict[str, Simplex],
                 validate: bool = True):
        self.source = source
        self.target = target
        self.images = dict(images)
        if validate:
            self.validate()

    def _target_data(self, up_to: int) -> FinSSet:
        return as_finsset(self.target, up_to)

    def apply(self, x: Simplex) -> Simplex:
        word, base = x
        Y = self._target_data(self.source.dim(x))
        out = self.images[base]
        for i in reversed(word):
            out = Y.degeneracy(out, i)
        return out

    def validate(self):
        for n, c in self.source.all_nondeg():
            img = self.images.get(c)
            if img is None:
                raise ValueError(f"no image for cell {c}")
            Y = self._target_data(n)
            if Y.dim(img) != n:
                raise ValueError(f"image of {c} has wrong dimension")
            for i in range(n + 1):
                if n == 0:
                    break
                if Y.face(img, i) != self.apply(self.source.face(((), c), i)):
                    raise ValueError(f"map does not commute with d_{i} at {c}")

    def signature(self) -> tuple:
        return tuple(sorted(self.images.items()))

    def compose(self, other: "SMap") -> "SMap":
        """self after other."""
        images = {c: self.apply(other.images[c]) for _, c in other.source.all_nondeg()}
        return SMap(other.source, self.target, images, validate=False)

    def __repr__(self):
        return f"SMap({len(self.images)} cells)"


def identity_map(X: FinSSet) -> SMap:
    return SMap(X, X, {c: ((), c) for _, c in X.all_nondeg()}, validate=False)


def simplicial_maps(K: FinSSet, X, limit: Optional[int] = None) -> list[SMap]:
    """All simplicial maps K -> X, by backtracking over nondegenerate cells.

    Cells are assigned most-constrained-first; every face relation between
    assigned cells is enforced, so the enumeration is exhaustive and exact.
    """
    dimK = K.top_dim
    if dimK < 0:
        return [SMap(K, X, {}, validate=False)]
    if isinstance(X, TruncatedSSet) and not X.has_level(dimK):
        raise InsufficientDataError(
            f"target stores levels to {X.top_dim} < dim K = {dimK}")
    Xd = as_finsset(X, dimK)

    level: dict[int, tuple[Simplex, ...]] = {d: Xd.simplices(d) for d in range(dimK + 1)}
    face_index: dict[tuple[int, int, Simplex], list[Simplex]] = {}
    for d in range(1, dimK + 1):
        for x in level[d]:
            for i in range(d + 1):
                face_index.setdefault((d, i, Xd.face(x, i)), []).append(x)

    cells = [(n, c) for n, c in K.all_nondeg()]
    # for constraint propagation: which higher cells use c as a face target
    users: dict[str, list[tuple[str, int, tuple[int, ...]]]] = {c: [] for _, c in cells}
    for n, c in cells:
        if n == 0:
            continue
        for i, (w, t) in enumerate(K.faces[c]):
            users[t].append((c, i, w))

    assign: dict[str, Simplex] = {}
    results: list[SMap] = []

    def image_of(x: Simplex) -> Simplex:
        w, b = x
        out = assign[b]
        for i in reversed(w):
            out = Xd.degeneracy(out, i)
        return out

    def consistent(c: str, val: Simplex) -> bool:
        n = K.dim_of[c]
        if n > 0:
            for i, (w, t) in enumerate(K.faces[c]):
                if t in assign:
                    img = assign[t]
                    for j in reversed(w):
                        img = Xd.degeneracy(img, j)
                    if Xd.face(val, i) != img:
                        return False
        for (h, i, w) in users[c]:
            if h in assign:
                img = val
                for j in reversed(w):
                    img = Xd.degeneracy(img, j)
                if Xd.face(assign[h], i) != img:
                    return False
        return True

    def candidates(c: str) -> list[Simplex]:
        n = K.dim_of[c]
        best = None
        if n > 0:
            for i, (w, t) in enumerate(K.faces[c]):
                if t in assign:
                    img = assign[t]
                    for j in reversed(w):
                        img = Xd.degeneracy(img, j)
                    lst = face_index.get((n, i, img), [])
                    if best is None or len(lst) < len(best):
                        best = lst
        pool = level[n] if best is None else best
        return [x for x in pool if consistent(c, x)]

    unassigned = [c for _, c in cells]

    def search():
        if limit is not None and len(results) >= limit:
            return
        if not unassigned:
            results.append(SMap(K, X, dict(assign), validate=False))
            return
        best_c, best_cands = None, None
        for c in unassigned:
            cands = candidates(c)
            if best_cands is None or len(cands) < len(best_cands):
                best_c, best_cands = c, cands
            if len(cands) == 0:
                break
        unassigned.remove(best_c)
        for val in best_cands:
            assign[best_c] = val
            search()
            del assign[best_c]
            if limit is not None and len(results) >= limit:
                break
        unassigned.append(best_c)

    search()
    results.sort(key=lambda f: f.signature())
    return results


def matching_set(K: FinSSet, X) -> list[SMap]:
    """The matching object Hom(K, X) as an explicit list of maps."""
    return simplicial_maps(K, X)


# ---------------------------------------------------------------------------
# hypergroupoid verification
# ---------------------------------------------------------------------------


@dataclass
class HypReport:
    dimension_tested: int
    mode: str
    failures: list[tuple] = field(default_factory=list)
    checked_levels: tuple[int, ...] = ()

    @property
    def verdict(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.verdict

    def __repr__(self):
        if self.verdict:
            return f"HypReport(n={self.dimension_tested}, {self.mode}, verdict=True)"
        return (f"HypReport(n={self.dimension_tested}, {self.mode}, "
                f"failures={self.failures})")


def point_sset() -> FinSSet:
    return delta(0)


def constant_map(X: FinSSet, Y: FinSSet, y0: str) -> SMap:
    """The map collapsing X to the vertex y0 of Y."""
    images = {}
    for n, c in X.all_nondeg():
        img: Simplex = ((), y0)
        for _ in range(n):
            img = Y.degeneracy(img, 0)
        images[c] = img
    return SMap(X, Y, images, validate=False)


def _restriction_signature(Xd: FinSSet, x: Simplex, shape: FinSSet, m: int) -> tuple:
    sig = []
    for d, c in shape.all_nondeg():
        sig.append((c, Xd.apply_ordmap(x, cell_inclusion_map(c, m))))
    return tuple(sig)


def _check_matching_level(Xd, Yd, f: SMap, m: int, shape: FinSSet,
                          want_surjective: bool, want_injective: bool):
    """Compare X_m with maps(shape -> X) x_{maps(shape -> Y)} Y_m."""
    horn_maps = simplicial_maps(shape, Xd)
    target: dict[tuple, int] = {}
    for h in horn_maps:
        hy_sig = tuple(sorted((c, f.apply(img)) for c, img in h.images.items()))
        target[(h.signature(), hy_sig)] = 0
    ym_restr = {}
    for y in Yd.simplices(m):
        sig = tuple(sorted((c, Yd.apply_ordmap(y, cell_inclusion_map(c, m)))
                           for _, c in shape.all_nondeg()))
        ym_restr.setdefault(sig, []).append(y)
    # elements of the fiber product: (horn map, y) with f o h = y|shape
    fiber: dict[tuple, int] = {}
    for (hsig, hysig) in target:
        for y in ym_restr.get(hysig, []):
            fiber[(hsig, y)] = 0
    for x in Xd.simplices(m):
        xr = tuple(sorted(_restriction_signature(Xd, x, shape, m)))
        key = (xr, f.apply(x))
        if key not in fiber:
            raise AssertionError("matching map lands outside the fiber product")
        fiber[key] += 1
    not_surj = any(v == 0 for v in fiber.values())
    not_inj = any(v > 1 for v in fiber.values())
    return (not_surj and want_surjective, not_inj and want_injective)


def is_hypergroupoid(arg, n: int, mode: str = "absolute",
                     max_level: Optional[int] = None) -> HypReport:
    """Check the horn-filling conditions defining an n-hypergroupoid.

    ``arg`` is a simplicial set (absolute mode) or an SMap f: X -> Y
    (relative / trivial_relative modes).  Partial matching maps must be
    surjective up to level n and bijective above; the trivial relative
    variant uses full boundary matching maps with bijectivity from level n
    upward.  Levels up to n+2 are examined (absolute/relative), plus a
    coskeletal reconstruction check on any higher stored levels.
    """
    if mode not in ("absolute", "relative", "trivial_relative"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "absolute":
        X = arg
        top = X.top_dim if isinstance(X, FinSSet) else X.data.top_dim
        need = max(n + 2, top) if mode != "trivial_relative" else max(n, top)
        Xd = as_finsset(X, need if not isinstance(X, FinSSet) else top)
        Yd = point_sset()
        f = constant_map(Xd, Yd, "0")
    else:
        f = arg
        Xd = f.source
        Yd = as_finsset(f.target, Xd.top_dim)

    report = HypReport(dimension_tested=n, mode=mode)
    if mode == "trivial_relative":
        top_check = max_level if max_level is not None else max(Xd.top_dim, Yd.top_dim, n)
        levels = range(0, top_check + 1)
        for m in levels:
            shape = boundary(m)
            surj_only = m < n
            ns, ni = _check_matching_level(
                Xd, Yd, f, m, shape,
                want_surjective=True, want_injective=not surj_only)
            if ns:
                report.failures.append((m, None, "not-surjective"))
            if ni:
                report.failures.append((m, None, "not-injective"))
        report.checked_levels = tuple(levels)
        return report

    cap = max_level if max_level is not None else max(Xd.top_dim, Yd.top_dim, n + 2)
    levels = []
    for m in range(0, min(n + 2, cap) + 1):
        levels.append(m)
        for k in range(m + 1):
            shape = horn(m, k)
            surj_only = m <= n
            ns, ni = _check_matching_level(
                Xd, Yd, f, m, shape,
                want_surjective=True, want_injective=not surj_only)
            if ns:
                report.failures.append((m, k, "not-surjective"))
            if ni:
                report.failures.append((m, k, "not-injective"))
    # coskeletal reconstruction above n+1 on stored levels (truncation lemma)
    for m in range(n + 3, cap + 1):
        levels.append(m)
        shape = restrict_to_skeleton(delta(m), n + 1)
        ns, ni = _check_matching_level(Xd, Yd, f, m, shape,
                                       want_surjective=True, want_injective=True)
        if ns:
            report.failures.append((m, None, "not-surjective"))
        if ni:
            report.failures.append((m, None, "not-injective"))
    report.checked_levels = tuple(levels)
    return report


def unique_horn_fillers(X, n: int, m: int) -> bool:
    """True when every horn Lambda^m_k in X has exactly one filler."""
    Xd = as_finsset(X, m)
    for k in range(m + 1):
        shape = horn(m, k)
        counts: dict[tuple, int] = {}
        for h in simplicial_maps(shape, Xd):
            counts[h.signature()] = 0
        for x in Xd.simplices(m):
            sig = tuple(sorted(_restriction_signature(Xd, x, shape, m)))
            counts[sig] += 1
        if any(v != 1 for v in counts.values()):
            return False
    return True


# ---------------------------------------------------------------------------
# coskeleta
# ---------------------------------------------------------------------------


def coskeleton(X: TruncatedSSet | FinSSet, c: int, up_to: Optional[int] = None) -> TruncatedSSet:
    """Fill levels c+1..up_to with boundary matching objects.

    New nondegenerate m-cells correspond to maps dDelta^m -> X whose
    boundary tuple is not that of any degenerate simplex.
    """
    if up_to is not None and up_to < c:
        raise ValueError("up_to must be >= c")
    base = X if isinstance(X, FinSSet) else X.data
    base = restrict_to_skeleton(base, c)
    target = c if up_to is None else up_to
    cells = {n: list(cs) for n, cs in base.cells.items()}
    faces = {cid: list(fs) for cid, fs in base.faces.items()}
    current = FinSSet(cells, faces, validate=False)
    for m in range(c + 1, target + 1):
        degenerate_sigs = set()
        for y in current.simplices(m - 1):
            for i in range(m):
                sy = current.degeneracy(y, i)
                degenerate_sigs.add(current.boundary_tuple(sy))
        new_cells = []
        shape = boundary(m)
        for h in simplicial_maps(shape, current):
            tup = tuple(h.apply(((), _subset_id(tuple(v for v in range(m + 1) if v != i))))
                        for i in range(m + 1))
            if tup in degenerate_sigs:
                continue
            new_cells.append(tup)
        ids = []
        for idx, tup in enumerate(sorted(new_cells)):
            cid = f"k{m}_{idx}"
            ids.append(cid)
            faces[cid] = list(tup)
        cells[m] = ids
        current = FinSSet(cells, faces, validate=False)
    return TruncatedSSet(current, coskeletal_above=c, validate=False)


# ---------------------------------------------------------------------------
# levelwise construction (nerves, decalage, fiber products)
# ---------------------------------------------------------------------------


def from_levelwise(levels: Sequence[Sequence], face_fn: Callable, degen_fn: Callable,
                   prefix: str = "c") -> tuple[FinSSet, list[dict]]:
    """Build nondegenerate tables from a concrete levelwise description.

    ``levels[n]`` lists the n-simplices as hashable values; ``face_fn(n, i, x)``
    and ``degen_fn(n, i, x)`` implement the structure maps.  Returns the
    FinSSet together with per-level dictionaries  element -> (word, base id).
    """
    expr: list[dict] = [dict() for _ in levels]
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    for n, elems in enumerate(levels):
        counter = 0
        for el in elems:
            if el in expr[n]:
                continue
            rep = None
            if n > 0:
                for i in range(n):
                    y = face_fn(n, i, el)
                    if degen_fn(n - 1, i, y) == el:
                        w, b = expr[n - 1][y]
                        rep = (word_insert(w, i), b)
                        break
            if rep is None:
                cid = f"{prefix}{n}_{counter}"
                counter += 1
                cells.setdefault(n, []).append(cid)
                if n > 0:
                    faces[cid] = [expr[n - 1][face_fn(n, i, el)] for i in range(n + 1)]
                rep = ((), cid)
            expr[n][el] = rep
    return FinSSet(cells, faces, validate=False), expr


def constant_sset(points: Sequence[str], up_to: int = 0) -> FinSSet:
    cells = {0: list(points)}
    return FinSSet(cells, {}, validate=False)


# -- finite groupoids -------------------------------------------------------


class FinGroupoid:
    """A finite groupoid: objects, morphisms, and a composition table.

    Composition is written left to right: ``comp[(f, g)]`` is defined when
    ``dst(f) == src(g)`` and is a morphism ``src(f) -> dst(g)``.
    """

    def __init__(self, objects: Sequence[str], morphisms: Sequence[str],
                 src: dict, dst: dict, comp: dict, identity: dict):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.src = dict(src)
        self.dst = dict(dst)
        self.comp = dict(comp)
        self.identity = dict(identity)
        self.validate()

    def validate(self):
        for f in self.morphisms:
            for g in self.morphisms:
                if self.dst[f] == self.src[g]:
                    h = self.comp[(f, g)]
                    if self.src[h] != self.src[f] or self.dst[h] != self.dst[g]:
                        raise ValueError("composition endpoints wrong")
        for a in self.objects:
            e = self.identity[a]
            if self.src[e] != a or self.dst[e] != a:
                raise ValueError("identity endpoints wrong")
        for f in self.morphisms:
            if self.comp[(self.identity[self.src[f]], f)] != f:
                raise ValueError("left unit fails")
            if self.comp[(f, self.identity[self.dst[f]])] != f:
                raise ValueError("right unit fails")
        for f in self.morphisms:
            for g in self.morphisms:
                for h in self.morphisms:
                    if self.dst[f] == self.src[g] and self.dst[g] == self.src[h]:
                        if self.comp[(self.comp[(f, g)], h)] != self.comp[(f, self.comp[(g, h)])]:
                            raise ValueError("associativity fails")
        for f in self.morphisms:
            if not any(self.src[g] == self.dst[f] and self.dst[g] == self.src[f]
                       and self.comp[(f, g)] == self.identity[self.src[f]]
                       and self.comp[(g, f)] == self.identity[self.dst[f]]
                       for g in self.morphisms):
                raise ValueError(f"{f} has no inverse")

    def is_discrete(self) -> bool:
        return len(self.morphisms) == len(self.objects)


def group_groupoid(elements: Sequence, mul: Callable, name: str = "g") -> FinGroupoid:
    """The one-object groupoid of a finite group given by a multiplication map."""
    elems = list(elements)
    label = {e: f"{name}{i}" for i, e in enumerate(elems)}
    unit = next(e for e in elems if all(mul(e, x) == x and mul(x, e) == x for x in elems))
    comp = {(label[a], label[b]): label[mul(a, b)] for a in elems for b in elems}
    return FinGroupoid(
        objects=["*"], morphisms=[label[e] for e in elems],
        src={label[e]: "*" for e in elems}, dst={label[e]: "*" for e in elems},
        comp=comp, identity={"*": label[unit]})


def cyclic_group(k: int) -> FinGroupoid:
    return group_groupoid(range(k), lambda a, b: (a + b) % k, name=f"z{k}_")


def symmetric_group(n: int) -> FinGroupoid:
    perms = list(itertools.permutations(range(n)))
    return group_groupoid(perms, lambda p, q: tuple(q[p[i]] for i in range(n)),
                          name=f"s{n}_")


def connected_groupoid(objects: Sequence[str], group: FinGroupoid) -> FinGroupoid:
    """The connected groupoid on given objects with a one-object vertex group."""
    assert len(group.objects) == 1
    morphs, src, dst, comp = [], {}, {}, {}
    for a in objects:
        for g in group.morphisms:
            for b in objects:
                m = f"{a}|{g}|{b}"
                morphs.append(m)
                src[m], dst[m] = a, b
    for m1 in morphs:
        a, g, b = m1.split("|")
        for m2 in morphs:
            b2, h, c = m2.split("|")
            if b == b2:
                comp[(m1, m2)] = f"{a}|{group.comp[(g, h)]}|{c}"
    e = group.identity[group.objects[0]]
    identity = {a: f"{a}|{e}|{a}" for a in objects}
    return FinGroupoid(objects, morphs, src, dst, comp, identity)


def disjoint_union_groupoid(g1: FinGroupoid, g2: FinGroupoid) -> FinGroupoid:
    ren1 = lambda s: f"A:{s}"
    ren2 = lambda s: f"B:{s}"
    objects = [ren1(o) for o in g1.objects] + [ren2(o) for o in g2.objects]
    morphs = [ren1(m) for m in g1.morphisms] + [ren2(m) for m in g2.morphisms]
    src = {ren1(m): ren1(g1.src[m]) for m in g1.morphisms}
    src.update({ren2(m): ren2(g2.src[m]) for m in g2.morphisms})
    dst = {ren1(m): ren1(g1.dst[m]) for m in g1.morphisms}
    dst.update({ren2(m): ren2(g2.dst[m]) for m in g2.morphisms})
    comp = {(ren1(a), ren1(b)): ren1(c) for (a, b), c in g1.comp.items()}
    comp.update({(ren2(a), ren2(b)): ren2(c) for (a, b), c in g2.comp.items()})
    identity = {ren1(o): ren1(g1.identity[o]) for o in g1.objects}
    identity.update({ren2(o): ren2(g2.identity[o]) for o in g2.objects})
    return FinGroupoid(objects, morphs, src, dst, comp, identity)


def nerve(G: FinGroupoid, up_to: int) -> tuple[FinSSet, list[dict]]:
    """The nerve of a finite groupoid, materialized to the given level."""
    levels: list[list] = [list(G.objects)]
    for n in range(1, up_to + 1):
        prev = levels[-1]
        cur = []
        if n == 1:
            cur = [(m,) for m in G.morphisms]
        else:
            for chain in prev:
                for m in G.morphisms:
                    if G.src[m] == G.dst[chain[-1]]:
                        cur.append(chain + (m,))
        levels.append(cur)

    def face_fn(n, i, el):
        if n == 1:
            return G.dst[el[0]] if i == 0 else G.src[el[0]]
        if i == 0:
            return el[1:]
        if i == n:
            return el[:-1]
        return el[:i - 1] + (G.comp[(el[i - 1], el[i])],) + el[i + 1:]

    def degen_fn(n, i, el):
        if n == 0:
            return (G.identity[el],)
        obj = G.src[el[i]] if i < n else G.dst[el[n - 1]]
        return el[:i] + (G.identity[obj],) + el[i:]

    return from_levelwise(levels, face_fn, degen_fn, prefix="ner")


# -- decalage ----------------------------------------------------------------


@dataclass
class DecPlusResult:
    dec: FinSSet
    counit: SMap
    section: SMap
    retraction: SMap
    expr: list[dict]


def dec_plus(X: FinSSet) -> DecPlusResult:
    """The shifted simplicial set Dec+(X)_n = X_{n+1} (top face forgotten).

    Returns Dec+(X) together with the counit (the forgotten top face), and
    the section/retraction pair of the deformation retract onto X_0.
    """
    N = X.top_dim
    if N < 1:
        raise InsufficientDataError("dec_plus needs at least one level above 0")
    levels = [list(X.simplices(n + 1)) for n in range(N)]
    dec, expr = from_levelwise(
        levels,
        lambda n, i, el: X.face(el, i),
        lambda n, i, el: X.degeneracy(el, i),
        prefix="dec")

    # element behind each nondegenerate Dec cell
    cell_elem: dict[str, Simplex] = {}
    for n, table in enumerate(expr):
        for el, (w, b) in table.items():
            if not w and b not in cell_elem:
                cell_elem[b] = el

    counit_images = {}
    for n, c in dec.all_nondeg():
        counit_images[c] = X.face(cell_elem[c], n + 1)
    counit = SMap(dec, X, counit_images)

    const0 = constant_sset(X.nondeg(0))
    section_images = {}
    for v in X.nondeg(0):
        section_images[v] = expr[0][X.degeneracy(((), v), 0)]
    section = SMap(const0, dec, section_images)

    retr_images = {}
    for n, c in dec.all_nondeg():
        el = cell_elem[c]
        for _ in range(n + 1):
            el = X.face(el, 0)
        # el is a vertex of X; the constant sset n-simplex over it
        w: tuple[int, ...] = tuple(range(n - 1, -1, -1))
        retr_images[c] = (w, el[1])
    retraction = SMap(dec, const0, retr_images)
    return DecPlusResult(dec, counit, section, retraction, expr)


def fiber_product(f: SMap, g: SMap, up_to: int) -> tuple[FinSSet, SMap, SMap]:
    """Levelwise fiber product of two maps with common target."""
    Xa, Xb = f.source, g.source
    levels = []
    for n in range(up_to + 1):
        levels.append([(x, z) for x in Xa.simplices(n) for z in Xb.simplices(n)
                       if f.apply(x) == g.apply(z)])
    P, expr = from_levelwise(
        levels,
        lambda n, i, el: (Xa.face(el[0], i), Xb.face(el[1], i)),
        lambda n, i, el: (Xa.degeneracy(el[0], i), Xb.degeneracy(el[1], i)),
        prefix="fp")
    cell_elem: dict[str, tuple] = {}
    for n, table in enumerate(expr):
        for el, (w, b) in table.items():
            if not w and b not in cell_elem:
                cell_elem[b] = el
    p1 = SMap(P, Xa, {c: cell_elem[c][0] for _, c in P.all_nondeg()})
    p2 = SMap(P, Xb, {c: cell_elem[c][1] for _, c in P.all_nondeg()})
    return P, p1, p2


# ---------------------------------------------------------------------------
# truncation / reconstruction
# ---------------------------------------------------------------------------


@dataclass
class TruncateReport:
    verdict: bool
    witness_level: Optional[int] = None

    def __bool__(self):
        return self.verdict


def truncate_reconstruct_check(X: FinSSet, Y: FinSSet, f: SMap, n: int) -> TruncateReport:
    """Check X = Y x_{cosk_{n+1} Y} cosk_{n+1} X levelwise up to the stored top.

    The level-m instance asks that x -> (f(x), x|sk_{n+1} Delta^m) be a
    bijection onto the compatible pairs.
    """
    top = min(X.top_dim, Y.top_dim) if Y.top_dim >= 0 else X.top_dim
    for m in range(n + 2, top + 1):
        shape = restrict_to_skeleton(delta(m), n + 1)
        ns, ni = _check_matching_level(X, Y, f, m, shape,
                                       want_surjective=True, want_injective=True)
        if ns or ni:
            return TruncateReport(False, m)
    return TruncateReport(True, None)
