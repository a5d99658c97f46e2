"""Finite truncated simplicial sets and their twisted chain complexes.

A simplicial set is stored by its nondegenerate simplices. Every face is
kept in Eilenberg-Zilber form ``s_J z``: a strictly decreasing degeneracy
word ``J`` applied to a nondegenerate simplex ``z``.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .cellterm import (Gen, Polygraph, TermParseError, ValidationReport,
                       unit)
from .chaincomplexer import chain_complex
from .localsystem import (FiniteCategoryData, LocalSystemData,
                          check_weak_local_system)
from .orientals import DimensionUnsupported, principal_boundary, relabel
from .zlinalg import (ChainComplex, ChainMap, IntMatrix, PresentedGroup,
                      ShapeMismatch, homology_of_complex)


class CapExceeded(RuntimeError):
    pass


class NotConnected(ValueError):
    pass


def canonical_degeneracies(word) -> tuple:
    """Normal form of ``s_{w0} s_{w1} ...``: a strictly decreasing word.

    Uses ``s_i s_j = s_{j+1} s_i`` for ``i <= j``.
    """
    w = list(word)
    changed = True
    while changed:
        changed = False
        for k in range(len(w) - 1):
            a, b = w[k], w[k + 1]
            if a <= b:
                w[k], w[k + 1] = b + 1, a
                changed = True
    return tuple(w)


@dataclass(frozen=True)
class Face:
    """The simplex ``s_{deg[0]} s_{deg[1]} ... base``."""

    deg: tuple
    base: str

    @property
    def degenerate(self) -> bool:
        return bool(self.deg)

    def to_json(self):
        if self.deg:
            return {"deg": [list(self.deg), self.base]}
        return {"nd": self.base}

    @classmethod
    def from_json(cls, obj) -> "Face":
        if isinstance(obj, dict) and set(obj) == {"nd"} and isinstance(obj["nd"], str):
            return cls((), obj["nd"])
        if isinstance(obj, dict) and set(obj) == {"deg"}:
            word, name = obj["deg"]
            if not isinstance(name, str) or not all(isinstance(j, int) for j in word):
                raise TermParseError(f"bad face {obj!r}")
            return cls(canonical_degeneracies(word), name)
        raise TermParseError(f"bad face {obj!r}")


def nd(name) -> Face:
    return Face((), name)


@dataclass
class SimplicialSetData:
    """Nondegenerate simplices per dimension with faces in EZ form.

    ``complete`` means there are no nondegenerate simplices above the
    stored ones, so homology is reliable in every stored degree.
    """

    simplices: list                  # simplices[n] = names of dimension n
    faces: dict                      # name -> tuple of n+1 Faces
    truncation_dim: int | None = None
    complete: bool = True
    _dim: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.truncation_dim is None:
            self.truncation_dim = len(self.simplices) - 1
        self._dim = {x: n for n, xs in enumerate(self.simplices) for x in xs}

    def dim(self, name: str) -> int:
        try:
            return self._dim[name]
        except KeyError:
            raise KeyError(f"unknown simplex {name!r}") from None

    def face_dim(self, f: Face) -> int:
        return self.dim(f.base) + len(f.deg)

    @property
    def top(self) -> int:
        return len(self.simplices) - 1

    def cells(self, n: int) -> list:
        return self.simplices[n] if 0 <= n < len(self.simplices) else []

    def reliable_degrees(self) -> int:
        """Number of degrees 0.. whose homology is determined by the data."""
        return self.truncation_dim + 1 if self.complete else self.truncation_dim

    def apply_face(self, i: int, f: Face) -> Face:
        """``d_i`` of the simplex ``f``."""
        n = self.face_dim(f)
        if not 0 <= i <= n or n == 0:
            raise ShapeMismatch(f"d_{i} of a {n}-simplex")
        out = []
        word = list(f.deg)
        for k, j in enumerate(word):
            if i < j:
                out.append(j - 1)
            elif i in (j, j + 1):
                return Face(canonical_degeneracies(out + word[k + 1:]), f.base)
            else:
                out.append(j)
                i -= 1
        bf = self.faces[f.base][i]
        return Face(canonical_degeneracies(out + list(bf.deg)), bf.base)

    def subsimplex(self, name: str, vertices) -> Face:
        """The face of ``name`` spanned by the given vertex positions."""
        n = self.dim(name)
        keep = set(vertices)
        f = nd(name)
        for i in range(n, -1, -1):
            if i not in keep:
                f = self.apply_face(i, f)
        return f

    def vertex(self, name: str, k: int) -> str:
        return self.subsimplex(name, [k]).base

    def last_vertex(self, name: str) -> str:
        return self.vertex(name, self.dim(name))

    def last_edge(self, name: str) -> Face:
        n = self.dim(name)
        return self.subsimplex(name, [n - 1, n])

    def edge_endpoints(self, e: str):
        return self.faces[e][1].base, self.faces[e][0].base

    def check(self) -> ValidationReport:
        """Face arities, dimensions and the identities d_i d_j = d_{j-1} d_i."""
        report = ValidationReport()
        for n, xs in enumerate(self.simplices):
            for x in xs:
                fs = self.faces.get(x, ())
                if n == 0:
                    if fs:
                        report.add("BadFace", x, "vertex with faces")
                    continue
                if len(fs) != n + 1:
                    report.add("BadFace", x, f"{len(fs)} faces for a {n}-simplex")
                    continue
                for i, f in enumerate(fs):
                    if f.base not in self._dim:
                        report.add("UnknownSimplex", x, f"face {i} refers to {f.base!r}")
                    elif self.face_dim(f) != n - 1:
                        report.add("BadFace", x, f"face {i} has dimension "
                                   f"{self.face_dim(f)}")
                    elif any(j > self.dim(f.base) + k
                             for k, j in enumerate(reversed(f.deg))):
                        report.add("BadFace", x, f"face {i} has an invalid degeneracy")
                    elif list(f.deg) != sorted(set(f.deg), reverse=True):
                        report.add("BadFace", x, f"face {i} not in normal form")
        if not report.ok:
            return report
        for n, xs in enumerate(self.simplices):
            if n < 2:
                continue
            for x in xs:
                for j in range(1, n + 1):
                    for i in range(j):
                        a = self.apply_face(i, self.apply_face(j, nd(x)))
                        b = self.apply_face(j - 1, self.apply_face(i, nd(x)))
                        if a != b:
                            report.add("SimplicialIdentity", x,
                                       f"d_{i} d_{j} = {a} but d_{j - 1} d_{i} = {b}")
        return report


# standard examples


def _vname(vs):
    return "".join(str(v) for v in vs) if all(v < 10 for v in vs) else \
        "-".join(str(v) for v in vs)


def _simplex_faces(vs):
    return tuple(nd(_vname(vs[:i] + vs[i + 1:])) for i in range(len(vs)))


def standard_simplex(n: int, proper: bool = False) -> SimplicialSetData:
    """Δ^n (or its boundary when ``proper``), simplices named by vertices."""
    top = n - 1 if proper else n
    simplices, faces = [], {}
    for d in range(top + 1):
        row = []
        for vs in combinations(range(n + 1), d + 1):
            name = _vname(vs)
            row.append(name)
            faces[name] = _simplex_faces(vs) if d else ()
        simplices.append(row)
    return SimplicialSetData(simplices, faces, top, complete=True)


def boundary_simplex(n: int) -> SimplicialSetData:
    return standard_simplex(n, proper=True)


def nerve(c: FiniteCategoryData, cap: int) -> SimplicialSetData:
    """Nerve truncated at ``cap``: chains of non-identity morphisms.

    A chain ``(f1, ..., fn)`` (f1 first) is named ``"f1,...,fn"``.
    """
    rep = c.check()
    if not rep.ok:
        raise ValueError(f"not a category: {rep.violations[0].message}")
    nonid = c.non_identities()
    chains = [[(x,) for x in c.objects]]
    for n in range(1, cap + 1):
        prev = chains[-1]
        row = []
        for ch in prev:
            last = ch[-1] if n > 1 else None
            end = c.tgt(last) if n > 1 else ch[0]
            for f in nonid:
                if c.src(f) == end:
                    row.append((f,) if n == 1 else ch + (f,))
        chains.append(row)

    def name(ch):
        return ",".join(str(f) for f in ch)

    def ez(ch, n, start):
        """EZ form of a possibly degenerate chain of length n from ``start``."""
        if n == 0:
            return nd(name(ch))
        ids = [k for k, f in enumerate(ch) if c.is_identity(f)]
        rest = tuple(f for f in ch if not c.is_identity(f))
        word = tuple(reversed(ids))
        base = name(rest) if rest else str(start)
        return Face(canonical_degeneracies(word), base)

    faces = {}
    for n, row in enumerate(chains):
        for ch in row:
            if n == 0:
                faces[name(ch)] = ()
                continue
            fs = []
            for i in range(n + 1):
                if n == 1:
                    v = c.tgt(ch[0]) if i == 0 else c.src(ch[0])
                    fs.append(nd(str(v)))
                    continue
                if i == 0:
                    sub, start = ch[1:], c.src(ch[1])
                elif i == n:
                    sub, start = ch[:-1], c.src(ch[0])
                else:
                    composite = c.compose[(ch[i], ch[i - 1])]
                    sub, start = ch[:i - 1] + (composite,) + ch[i + 1:], c.src(ch[0])
                fs.append(ez(sub, n - 1, start))
            faces[name(ch)] = tuple(fs)
    simplices = [[name(ch) for ch in row] for row in chains]
    # complete if no chain of length cap + 1 exists
    complete = not any(c.src(f) == c.tgt(ch[-1])
                       for ch in chains[cap] for f in nonid) if cap > 0 else not nonid
    return SimplicialSetData(simplices, faces, cap, complete=complete)


def category_system(c: FiniteCategoryData, x: SimplicialSetData, groups: dict,
                    arrows: dict) -> LocalSystemData:
    """Local system over the nerve from a system given per morphism."""
    base = c1_polygraph(x)
    return LocalSystemData(base, {str(v): groups[v] for v in c.objects},
                           {e: arrows[e] for e in x.cells(1)})


# complexes


def normalized_complex(x: SimplicialSetData, m: LocalSystemData,
                       top: int | None = None) -> ChainComplex:
    """Normalized chains with twisted last face.

    d(x, v) = Σ_{i<n} (-1)^i (d_i x, v) + (-1)^n (d_n x, e^* v), with e the
    last edge of x; degenerate faces are dropped.
    """
    top = x.top if top is None else min(top, x.top)
    offsets, groups = [], []
    for n in range(top + 1):
        off, table, gs = 0, {}, []
        for s in x.cells(n):
            g = m.group(x.last_vertex(s))
            table[s] = off
            off += g.generators
            gs.append(g)
        offsets.append((table, off))
        groups.append(PresentedGroup.direct_sum(gs))
    diffs = []
    for n in range(1, top + 1):
        table, rows = offsets[n - 1]
        cols = []
        for s in x.cells(n):
            r = m.rank(x.last_vertex(s))
            e = x.last_edge(s)
            twist = IntMatrix.identity(r) if e.degenerate else m.arrows[e.base]
            for j in range(r):
                v = [0] * rows
                unit_vec = [int(k == j) for k in range(r)]
                for i in range(n + 1):
                    f = x.apply_face(i, nd(s))
                    if f.degenerate:
                        continue
                    sign = -1 if i % 2 else 1
                    coeff = twist.apply(unit_vec) if i == n else unit_vec
                    off = table[f.base]
                    for k, c in enumerate(coeff):
                        v[off + k] += sign * c
                cols.append(v)
        diffs.append(IntMatrix.from_columns(cols, rows))
    c = ChainComplex(groups, diffs,
                     labels=[[(s, j) for s in x.cells(n)
                              for j in range(m.rank(x.last_vertex(s)))]
                             for n in range(top + 1)])
    return c.check()


def simplicial_homology(x: SimplicialSetData, m: LocalSystemData):
    """Homology in the degrees the truncation determines."""
    return homology_of_complex(normalized_complex(x, m), x.reliable_degrees())


@dataclass
class SimplicialMapData:
    source: SimplicialSetData
    target: SimplicialSetData
    images: dict          # nondegenerate source simplex -> Face in target

    def image(self, f: Face) -> Face:
        g = self.images[f.base]
        return Face(canonical_degeneracies(list(f.deg) + list(g.deg)), g.base)

    def check(self) -> ValidationReport:
        report = ValidationReport()
        for n, xs in enumerate(self.source.simplices):
            for s in xs:
                if s not in self.images:
                    report.add("UnknownSimplex", s, "no image")
                    continue
                if self.target.face_dim(self.images[s]) != n:
                    report.add("BadFace", s, "image of wrong dimension")
                    continue
                for i in range(n + 1 if n else 0):
                    a = self.image(self.source.apply_face(i, nd(s)))
                    b = self.target.apply_face(i, self.images[s])
                    if a != b:
                        report.add("NotSimplicial", s, f"f d_{i} = {a}, d_{i} f = {b}")
        return report


def pullback_system(f: SimplicialMapData, m: LocalSystemData) -> LocalSystemData:
    groups = {v: m.group(f.images[v].base) for v in f.source.cells(0)}
    arrows = {}
    for e in f.source.cells(1):
        img = f.images[e]
        if img.degenerate:
            arrows[e] = IntMatrix.identity(groups[f.source.edge_endpoints(e)[0]].generators)
        else:
            arrows[e] = m.arrows[img.base]
    return LocalSystemData(c1_polygraph(f.source), groups, arrows)


def induced_simplicial_chain_map(f: SimplicialMapData, m: LocalSystemData) -> ChainMap:
    rep = f.check()
    if not rep.ok:
        raise ShapeMismatch(f"not a simplicial map: {rep.violations[0].message}")
    src = normalized_complex(f.source, pullback_system(f, m))
    tgt = normalized_complex(f.target, m)
    comps = []
    for n in range(src.top + 1):
        offs, off = {}, 0
        for s in f.target.cells(n):
            offs[s] = off
            off += m.rank(f.target.last_vertex(s))
        cols = []
        for s in f.source.cells(n):
            img = f.images[s]
            r = m.rank(f.images[f.source.last_vertex(s)].base)
            for j in range(r):
                v = [0] * off
                if not img.degenerate:
                    v[offs[img.base] + j] = 1
                cols.append(v)
        comps.append(IntMatrix.from_columns(cols, off))
    fm = ChainMap(src, tgt, comps)
    if not fm.is_chain_map():
        raise ShapeMismatch("induced map does not commute with differentials")
    return fm


# fundamental category and groupoid


@dataclass
class CategoryPresentation:
    objects: list
    arrows: dict                  # edge -> (src, tgt)
    relations: list               # (2-simplex, lhs word, rhs word), written order


def _edge_word(f: Face) -> list:
    return [] if f.degenerate else [f.base]


def fundamental_category(x: SimplicialSetData) -> CategoryPresentation:
    arrows = {e: x.edge_endpoints(e) for e in x.cells(1)}
    rels = []
    for s in x.cells(2):
        d0, d1, d2 = x.faces[s]
        rels.append((s, _edge_word(d1), _edge_word(d0) + _edge_word(d2)))
    return CategoryPresentation(list(x.cells(0)), arrows, rels)


@dataclass
class GroupoidPresentation:
    """π1 at a basepoint via a spanning tree of its component.

    ``generators`` are the non-tree edges; a relator is a list of
    ``(edge, ±1)`` in composition order.
    """

    objects: list
    edges: dict
    tree: set
    generators: list
    relators: list
    basepoint: str
    components: list

    def edge_letter(self, e: str):
        return None if e in self.tree else e

    def fp_group(self):
        from sympy.combinatorics.free_groups import free_group
        from sympy.combinatorics.fp_groups import FpGroup
        if not self.generators:
            return None, {}
        F, *syms = free_group(",".join(f"g{k}" for k in range(len(self.generators))))
        sym = dict(zip(self.generators, syms))
        rels = []
        for r in self.relators:
            w = F.identity
            for e, k in r:
                w = w * sym[e] ** k
            if w != F.identity:
                rels.append(w)
        return FpGroup(F, rels), sym


def pi1(x: SimplicialSetData, basepoint: str) -> GroupoidPresentation:
    adj = {v: [] for v in x.cells(0)}
    edges = {}
    for e in x.cells(1):
        s, t = x.edge_endpoints(e)
        edges[e] = (s, t)
        adj[s].append((e, t))
        adj[t].append((e, s))
    components, seen = [], set()
    tree, comp_of = set(), {}
    for root in [basepoint] + [v for v in x.cells(0) if v != basepoint]:
        if root in seen:
            continue
        comp = [root]
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for e, w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    comp.append(w)
                    queue.append(w)
        components.append(comp)
    for k, comp in enumerate(components):
        for v in comp:
            comp_of[v] = k
    mine = set(components[0])
    gens = [e for e in x.cells(1) if e not in tree and edges[e][0] in mine]
    relators = []
    for s in x.cells(2):
        if x.last_vertex(s) not in mine:
            continue
        d0, d1, d2 = x.faces[s]
        word = []
        for f, k in ((d0, 1), (d2, 1)):
            if not f.degenerate and f.base not in tree:
                word.append((f.base, k))
        if not d1.degenerate and d1.base not in tree:
            word.append((d1.base, -1))
        relators.append(word)
    return GroupoidPresentation(list(components[0]), edges, tree, gens, relators,
                                basepoint, components)


class PiOne:
    """Finite π1 enumerated by coset enumeration on the trivial subgroup."""

    def __init__(self, pres: GroupoidPresentation, cap: int):
        self.pres = pres
        group, self.sym = pres.fp_group()
        if group is None:
            self.order = 1
            self.table = [[]]
            self.col = {}
            return
        from sympy.combinatorics.fp_groups import coset_enumeration_r
        try:
            table = coset_enumeration_r(group, [], max_cosets=cap)
        except ValueError as e:
            raise CapExceeded(f"π1 enumeration exceeded {cap} elements") from e
        table.compress()
        table.standardize()
        self.order = len(table.table)
        if self.order > cap:
            raise CapExceeded(f"π1 has {self.order} > {cap} elements")
        self.table = table.table
        self.col = {e: table.A.index(s) for e, s in self.sym.items()}

    def act(self, g: int, e: Face) -> int:
        """``g · w(e)``: right action of the loop of an edge."""
        if e.degenerate or e.base in self.pres.tree:
            return g
        return self.table[g][self.col[e.base]]


def universal_cover(x: SimplicialSetData, basepoint: str, cap: int = 1000):
    """The cover with simplices ``(s, g)`` named ``"s@g"``.

    Returns ``(cover, projection, group)`` where ``projection`` maps cover
    simplex names to base names and ``group`` is the enumerated π1.
    """
    pres = pi1(x, basepoint)
    if len(pres.components) > 1:
        raise NotConnected("universal cover needs a connected simplicial set")
    group = PiOne(pres, cap)
    simplices, faces, proj = [], {}, {}
    for n, xs in enumerate(x.simplices):
        row = []
        for s in xs:
            for g in range(group.order):
                name = f"{s}@{g}"
                row.append(name)
                proj[name] = s
                if n == 0:
                    faces[name] = ()
                    continue
                fs = []
                for i in range(n + 1):
                    f = x.faces[s][i]
                    h = group.act(g, x.last_edge(s)) if i == n else g
                    fs.append(Face(f.deg, f"{f.base}@{h}"))
                faces[name] = tuple(fs)
        simplices.append(row)
    cover = SimplicialSetData(simplices, faces, x.truncation_dim, x.complete)
    return cover, proj, group


def group_ring_system(x: SimplicialSetData, group: PiOne) -> LocalSystemData:
    """M_v = Z[π1] with e^* the permutation γ -> γ·w(e)."""
    r = group.order
    zg = PresentedGroup(r)
    arrows = {}
    for e in x.cells(1):
        rows = [[0] * r for _ in range(r)]
        for g in range(r):
            rows[group.act(g, nd(e))][g] = 1
        arrows[e] = IntMatrix.from_rows(rows, r)
    return LocalSystemData(c1_polygraph(x), {v: zg for v in x.cells(0)}, arrows)


def cover_identification_check(x: SimplicialSetData, basepoint: str, cap: int = 1000) -> dict:
    """C(cover, Z) against the base complex with coefficients in Z[π1]."""
    cover, proj, group = universal_cover(x, basepoint, cap)
    lhs = normalized_complex(cover, constant_on(cover))
    rhs = normalized_complex(x, group_ring_system(x, group))
    fibers = {s: sum(1 for v in proj.values() if v == s)
              for xs in x.simplices for s in xs}
    equal = lhs.differentials == rhs.differentials and \
        [g.generators for g in lhs.groups] == [g.generators for g in rhs.groups]
    return {"ok": equal and all(v == group.order for v in fibers.values()),
            "order": group.order, "fibers": fibers,
            "cover_check": cover.check().ok}


def constant_on(x: SimplicialSetData, group: PresentedGroup | None = None) -> LocalSystemData:
    group = group or PresentedGroup(1)
    r = group.generators
    return LocalSystemData(c1_polygraph(x), {v: group for v in x.cells(0)},
                           {e: IntMatrix.identity(r) for e in x.cells(1)})


# the polygraph c(X)


def _face_term(f: Face, x: SimplicialSetData):
    return unit(Gen(f.base), len(f.deg))


def realization_polygraph(x: SimplicialSetData, top: int | None = None) -> Polygraph:
    """c(X): one generator per nondegenerate simplex, oriental boundaries."""
    top = x.top if top is None else min(top, x.top)
    if top > 3:
        raise DimensionUnsupported(f"c(X) is tabulated up to dimension 3, not {top}")
    p = Polygraph()
    for n in range(top + 1):
        for s in x.cells(n):
            if n == 0:
                p.add(s, 0)
                continue
            src, tgt = principal_boundary(n)

            def mapping(name, s=s):
                return _face_term(x.subsimplex(s, [int(c) for c in name]), x)

            p.add(s, n, relabel(src, mapping), relabel(tgt, mapping))
    return p


def c1_polygraph(x: SimplicialSetData) -> Polygraph:
    """c(X) up to dimension 2: carries exactly the relations of c_1(X)."""
    return realization_polygraph(x, 2)


@dataclass
class ComparisonReport:
    ok: bool
    degree: int | None = None
    message: str = ""
    ranks: list = field(default_factory=list)

    def to_json(self):
        return {"ok": self.ok, "degree": self.degree, "message": self.message,
                "ranks": self.ranks}


def comparison_iso_check(x: SimplicialSetData, m: LocalSystemData,
                         top: int = 3) -> ComparisonReport:
    """Compare normalized chains with C(c(X), M) generator by generator."""
    top = min(top, x.top)
    rep = x.check()
    if not rep.ok:
        v = rep.violations[0]
        return ComparisonReport(False, None, f"simplicial set invalid at {v.location}: {v.message}")
    p = realization_polygraph(x, top)
    mp = LocalSystemData(p, m.groups, m.arrows)
    rep = check_weak_local_system(mp)
    if not rep.ok:
        return ComparisonReport(False, None, f"system invalid: {rep.violations[0].message}")
    a = normalized_complex(x, m, top)
    b = chain_complex(p, mp)
    ranks = [g.generators for g in a.groups]
    if ranks != [g.generators for g in b.groups]:
        return ComparisonReport(False, None, "ranks differ", ranks)
    if a.labels != [[(s, j) for s, j in lab] for lab in b.labels]:
        return ComparisonReport(False, None, "bases differ", ranks)
    for n in range(1, top + 1):
        da, db = a.d(n), b.d(n)
        if da != db:
            for i in range(da.rows):
                for j in range(da.cols):
                    if da[i, j] != db[i, j]:
                        return ComparisonReport(
                            False, n, f"d_{n}[{a.labels[n - 1][i]}, {a.labels[n][j]}]: "
                            f"simplicial {da[i, j]}, polygraphic {db[i, j]}", ranks)
    return ComparisonReport(True, None, "differentials equal", ranks)


def random_weak_system(x: SimplicialSetData, rng: random.Random, rank: int = 1,
                       lo: int = -2, hi: int = 2, tries: int = 200) -> LocalSystemData:
    """A random weak local system over c_1(X).

    Edges that never occur as the long face d_1 of a 2-simplex get random
    matrices with entries in [lo, hi]; the others are forced to products.
    Raises ValueError if no consistent choice is found.
    """
    base = c1_polygraph(x)
    z = PresentedGroup(rank)
    twos = [x.faces[s] for s in x.cells(2)]
    long_edges = {d1.base for _, d1, _ in twos if not d1.degenerate}
    ident = IntMatrix.identity(rank)

    def mat(f, table):
        return ident if f.degenerate else table.get(f.base)

    for _ in range(tries):
        table = {}
        free = [e for e in x.cells(1) if e not in long_edges] + \
            [e for e in x.cells(1) if e in long_edges]
        progress = True
        while len(table) < len(x.cells(1)):
            progress = False
            for d0, d1, d2 in twos:
                a0, a2 = mat(d0, table), mat(d2, table)
                if a0 is not None and a2 is not None and not d1.degenerate \
                        and d1.base not in table:
                    table[d1.base] = a2 @ a0
                    progress = True
            if not progress:
                e = next(e for e in free if e not in table)
                table[e] = IntMatrix(rank, rank,
                                     [rng.randint(lo, hi) for _ in range(rank * rank)])
        m = LocalSystemData(base, {v: z for v in x.cells(0)}, table)
        if check_weak_local_system(m).ok:
            return m
    raise ValueError("no consistent random weak local system found")


# JSON


def simplicial_to_json(x: SimplicialSetData) -> dict:
    return {"simplices": x.simplices,
            "faces": {s: [f.to_json() for f in x.faces[s]]
                      for xs in x.simplices[1:] for s in xs},
            "truncation_dim": x.truncation_dim,
            "complete": x.complete}


def simplicial_from_json(obj) -> SimplicialSetData:
    if not isinstance(obj, dict) or not isinstance(obj.get("simplices"), list):
        raise TermParseError("simplicial set must have a 'simplices' list")
    simplices = obj["simplices"]
    for row in simplices:
        if not isinstance(row, list) or not all(isinstance(s, str) for s in row):
            raise TermParseError("simplex names must be strings")
    faces = {s: () for s in simplices[0]} if simplices else {}
    raw = obj.get("faces", {})
    for row in simplices[1:]:
        for s in row:
            if s not in raw:
                raise TermParseError(f"missing faces of {s!r}")
            faces[s] = tuple(Face.from_json(f) for f in raw[s])
    return SimplicialSetData([list(r) for r in simplices], faces,
                             obj.get("truncation_dim"), obj.get("complete", True))


def category_to_json(c: FiniteCategoryData) -> dict:
    return {"objects": list(c.objects),
            "morphisms": {f: list(st) for f, st in c.morphisms.items()},
            "identities": dict(c.identities),
            "compose": [[g, f, h] for (g, f), h in c.compose.items()]}


def category_from_json(obj) -> FiniteCategoryData:
    try:
        return FiniteCategoryData(
            list(obj["objects"]),
            {f: tuple(st) for f, st in obj["morphisms"].items()},
            dict(obj["identities"]),
            {(g, f): h for g, f, h in obj["compose"]})
    except (KeyError, TypeError, ValueError) as e:
        raise TermParseError(f"bad category: {e}") from None


def load_space(path) -> SimplicialSetData:
    """A simplicial set file, or a category file with a nerve ``cap``."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "category" in obj:
        return nerve(category_from_json(obj["category"]), int(obj.get("cap", 3)))
    return simplicial_from_json(obj)
