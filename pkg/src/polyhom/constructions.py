"""The right adjoint G(N) to X' |-> C(X', p^*M), and the category of elements ∫E.

A cell of G(N) over an n-cell x of X is a table

    u0_0  u0_1 ... u0_{n-1}
                            u_n
    u1_0  u1_1 ... u1_{n-1}

of matrices into N_0 .. N_n with d_i u^e_i = u1_{i-1} - u0_{i-1} for i > 1
and d_1 u^e_1 = u1_0 - u0_0 t_1(x)^*  (u^e_n meaning u_n).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cellterm import (CellTerm, Comp, Gen, Id, OmegaFunctorData, Polygraph,
                       SRC, TGT, TermParseError, ValidationReport, boundary, comp,
                       dim, normal_form_1, obj_src, obj_tgt)
from .chaincomplexer import Basis, chain_complex, cls
from .localsystem import LocalSystemData, evaluate_on_1cell, pullback
from .zlinalg import (ChainComplex, IntMatrix, PresentedGroup, ShapeMismatch,
                      equal_maps)


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class GCell:
    x: CellTerm
    u0: tuple          # u0[i]: i = 0 .. n-1
    u1: tuple
    top: IntMatrix     # u_n

    @property
    def n(self) -> int:
        return len(self.u0)

    def slot(self, i: int, eps: int) -> IntMatrix:
        if i == self.n:
            return self.top
        return (self.u0 if eps == 0 else self.u1)[i]


@dataclass
class GContext:
    """Base polygraph X, system M on X and the complex N."""

    base: Polygraph
    m: LocalSystemData
    complex: ChainComplex

    def twist(self, x: CellTerm) -> IntMatrix:
        """t_1(x)^* for a cell of dimension >= 1."""
        return evaluate_on_1cell(self.m, boundary(x, 1, TGT, self.base))

    def check(self, c: GCell) -> ValidationReport:
        """Shapes and the differential compatibility of a cell."""
        report = ValidationReport()
        p, N = self.base, self.complex
        n = dim(c.x, p)
        if c.n != n or len(c.u1) != n:
            report.add("ShapeMismatch", str(c.x), "table length differs from dimension")
            return report
        rt = self.m.rank(obj_tgt(c.x, p))
        rs = self.m.rank(obj_src(c.x, p))
        for i in range(n + 1):
            for eps in (0, 1):
                want = (N.rank(i), rs if (i, eps) == (0, 0) else rt)
                if c.slot(i, eps).shape != want:
                    report.add("ShapeMismatch", f"u{eps}_{i}",
                               f"shape {c.slot(i, eps).shape}, expected {want}")
        if not report.ok:
            return report
        for i in range(1, n + 1):
            for eps in (0, 1):
                lhs = N.d(i) @ c.slot(i, eps)
                if i == 1:
                    rhs = c.slot(0, 1) - c.slot(0, 0) @ self.twist(c.x)
                else:
                    rhs = c.slot(i - 1, 1) - c.slot(i - 1, 0)
                if not equal_maps(lhs, rhs, N.group(i - 1)):
                    report.add("Differential", f"u{eps}_{i}",
                               "d u does not match the lower slots")
        return report

    # the three structure maps

    def source(self, c: GCell) -> GCell:
        return self._drop(c, SRC)

    def target(self, c: GCell) -> GCell:
        return self._drop(c, TGT)

    def _drop(self, c: GCell, side: str) -> GCell:
        n = c.n
        if n == 0:
            raise ShapeMismatch("a 0-cell has no boundary")
        x = boundary(c.x, n - 1, side, self.base)
        top = c.u0[n - 1] if side == SRC else c.u1[n - 1]
        return GCell(x, c.u0[:n - 1], c.u1[:n - 1], top)

    def unit(self, c: GCell) -> GCell:
        n = c.n
        z = IntMatrix.zeros(self.complex.rank(n + 1), c.top.cols)
        return GCell(Id(c.x), c.u0 + (c.top,), c.u1 + (c.top,), z)

    def comp(self, i: int, v: GCell, u: GCell) -> GCell:
        """(y, V) *_i (x, U), with (y, V) following (x, U)."""
        n = u.n
        if v.n != n or not 0 <= i < n:
            raise NotComposable(f"*_{i} of cells of dimensions {v.n} and {n}")
        t, s = self._boundary_at(u, i, TGT), self._boundary_at(v, i, SRC)
        if not self._same(t, s):
            raise NotComposable(f"target of {u.x} at level {i} differs from "
                                f"source of {v.x}")
        x = comp(i, v.x, u.x, self.base)
        if i == 0:
            tw = self.twist(v.x)
            u0 = (u.u0[0],) + tuple(v.u0[k] + u.u0[k] @ tw for k in range(1, n))
            u1 = (v.u1[0],) + tuple(v.u1[k] + u.u1[k] @ tw for k in range(1, n))
            top = v.top + u.top @ tw
        else:
            u0 = u.u0[:i + 1] + tuple(v.u0[k] + u.u0[k] for k in range(i + 1, n))
            u1 = v.u1[:i + 1] + tuple(v.u1[k] + u.u1[k] for k in range(i + 1, n))
            top = v.top + u.top
        return GCell(x, u0, u1, top)

    def _boundary_at(self, c: GCell, i: int, side: str) -> GCell:
        while c.n > i + 1:
            c = self._drop(c, side)
        return self._drop(c, side)

    def _same(self, a: GCell, b: GCell) -> bool:
        from .cellterm import cells_equivalent
        if a.n != b.n or not cells_equivalent(a.x, b.x, self.base):
            return False
        for i in range(a.n + 1):
            for eps in (0, 1):
                if a.slot(i, eps) != b.slot(i, eps):
                    return False
        return True

    def equal(self, a: GCell, b: GCell) -> bool:
        """Equality of cells, comparing slots as maps into N."""
        from .cellterm import cells_equivalent
        if a.n != b.n or not cells_equivalent(a.x, b.x, self.base):
            return False
        N = self.complex
        return all(equal_maps(a.slot(i, e), b.slot(i, e), N.group(i))
                   for i in range(a.n + 1) for e in (0, 1))

    def random_cell(self, x: CellTerm, rng: random.Random, prescribed=None,
                    lo: int = -2, hi: int = 2) -> GCell:
        """A random cell over ``x``; ``prescribed`` fixes leading top-row slots.

        The top row (and u_n) is free; the bottom row is then forced.
        """
        p, N = self.base, self.complex
        n = dim(x, p)
        rt = self.m.rank(obj_tgt(x, p))
        rs = self.m.rank(obj_src(x, p))
        prescribed = prescribed or {}

        def rand(r, c):
            return IntMatrix(r, c, [rng.randint(lo, hi) for _ in range(r * c)])

        row0 = []
        for i in range(n + 1):
            if i in prescribed:
                row0.append(prescribed[i])
            else:
                row0.append(rand(N.rank(i), rs if i == 0 else rt))
        if n == 0:
            return GCell(x, (), (), row0[0])
        row1 = [None] * n
        for k in range(n, 1, -1):
            row1[k - 1] = row0[k - 1] + N.d(k) @ row0[k]
        row1[0] = N.d(1) @ row0[1] + row0[0] @ self.twist(x)
        return GCell(x, tuple(row0[:n]), tuple(row1), row0[n])

    def composable_partner(self, u: GCell, y: CellTerm, i: int,
                           rng: random.Random) -> GCell:
        """A random cell over ``y`` that can follow ``u`` at level ``i``."""
        pres = {k: u.slot(k, 0) for k in range(i)}
        t = self._boundary_at(u, i, TGT)
        pres[i] = t.top
        return self.random_cell(y, rng, pres)


def g_source_target_comp(ctx: GContext, op: str, *cells: GCell, level: int = 0) -> GCell:
    """Dispatch ``source``/``target``/``unit``/``comp`` on cells of G(N)."""
    if op == "source":
        out = ctx.source(*cells)
    elif op == "target":
        out = ctx.target(*cells)
    elif op == "unit":
        out = ctx.unit(*cells)
    elif op == "comp":
        out = ctx.comp(level, *cells)
    else:
        raise ValueError(f"unknown operation {op!r}")
    return out


# unit and counit


def unit_eta(xp: Polygraph, p: OmegaFunctorData, m: LocalSystemData,
             cell: CellTerm, n_complex: ChainComplex | None = None) -> GCell:
    """η(x') = (p(x'), U) with slots the classes of the boundaries of x'."""
    mp = pullback(m, p)
    N = n_complex or chain_complex(xp, mp)
    d = dim(cell, xp)

    def slot(t, i):
        b = N.bases[i] if i < len(N.bases) else Basis(xp, mp, i)
        r = mp.rank(obj_tgt(t, xp))
        cols = [b.flatten(cls(xp, mp, t, [int(k == j) for k in range(r)]))
                for j in range(r)]
        return IntMatrix.from_columns(cols, b.size)

    u0 = tuple(slot(boundary(cell, i, SRC, xp), i) for i in range(d))
    u1 = tuple(slot(boundary(cell, i, TGT, xp), i) for i in range(d))
    return GCell(p(cell), u0, u1, slot(cell, d))


def counit_eps(n_complex: ChainComplex, gcell: GCell, coeff) -> tuple:
    """ε(x, U, m) = u_n(m), an element of N_n."""
    if gcell.top.rows != n_complex.rank(gcell.n):
        raise ShapeMismatch("top slot does not land in N_n")
    return gcell.top.apply(coeff)


def random_complex(ranks: list, rng: random.Random, lo: int = -2, hi: int = 2) -> ChainComplex:
    """A free complex with the given ranks and random differentials, d∘d = 0."""
    from .zlinalg import kernel_basis
    groups = [PresentedGroup(r) for r in ranks]
    diffs = []
    for n in range(1, len(ranks)):
        r_lo, r_hi = ranks[n - 1], ranks[n]
        if n == 1:
            d = IntMatrix(r_lo, r_hi, [rng.randint(lo, hi) for _ in range(r_lo * r_hi)])
        else:
            k = kernel_basis(diffs[-1])
            mix = IntMatrix(k.cols, r_hi, [rng.randint(lo, hi) for _ in range(k.cols * r_hi)])
            d = k @ mix if k.cols else IntMatrix.zeros(r_lo, r_hi)
        diffs.append(d)
    return ChainComplex(groups, diffs).check()


def adjunction_triangle_check(xp: Polygraph, p: OmegaFunctorData, m: LocalSystemData,
                              n_complex: ChainComplex, rng: random.Random,
                              samples: int = 5) -> ValidationReport:
    """Both triangle identities, plus functoriality of η and closure of G(N).

    First identity: ε(η(x'), m) is the basis chain (x', m) for every
    generator x' of X'. Second: on sampled cells c of G(N), the cell
    G(ε)(η(c)) rebuilt from the iterated boundaries of c equals c.
    """
    report = ValidationReport()
    mp = pullback(m, p)
    F = chain_complex(xp, mp)
    ctx_F = GContext(p.target, m, F)
    for n in range(xp.max_dim + 1):
        b = F.bases[n]
        for g in xp.cells(n):
            eta = unit_eta(xp, p, m, Gen(g), F)
            rep = ctx_F.check(eta)
            if not rep.ok:
                report.add("EtaInvalid", g, rep.violations[0].message)
                continue
            for j in range(b.ranks[g]):
                e = tuple(int(k == j) for k in range(b.ranks[g]))
                got = counit_eps(F, eta, e)
                want = b.flatten({g: e})
                if not F.group(n).equal_elements(got, want):
                    report.add("Triangle1", f"{g}[{j}]", f"ε η gives {got}, expected {want}")
    # η commutes with composition on the composable pairs of X'
    for t in _composites(xp):
        lhs = unit_eta(xp, p, m, t, F)
        rhs = ctx_F.comp(t.i, unit_eta(xp, p, m, t.left, F),
                         unit_eta(xp, p, m, t.right, F))
        if not ctx_F.equal(lhs, rhs):
            report.add("EtaFunctor", str(t), "η does not preserve the composite")
    ctx = GContext(p.target, m, n_complex)
    X = p.target
    for g in X:
        for _ in range(samples):
            c = ctx.random_cell(Gen(g.name), rng)
            rep = ctx.check(c)
            if not rep.ok:
                report.add("GCellInvalid", g.name, rep.violations[0].message)
                continue
            if not ctx.equal(_rebuild(ctx, c), c):
                report.add("Triangle2", g.name, "G(ε) η differs from the identity")
            u = ctx.unit(c)
            if not ctx.check(u).ok or not ctx.equal(ctx.source(u), c) \
                    or not ctx.equal(ctx.target(u), c):
                report.add("Unit", g.name, "unit cell is invalid")
    for t in _composites(X):
        for _ in range(samples):
            u = ctx.random_cell(t.right, rng)
            v = ctx.composable_partner(u, t.left, t.i, rng)
            w = ctx.comp(t.i, v, u)
            rep = ctx.check(w)
            if not rep.ok:
                report.add("CompInvalid", str(t), rep.violations[0].message)
    return report


def _rebuild(ctx: GContext, c: GCell) -> GCell:
    """Cell whose slot (i, e) is ε applied to η of the i-boundary of c.

    ε(η(s_i c), m) is the top slot of the i-source of c, so this reads
    every slot back through every route of iterated sources and targets.
    """
    n = c.n
    u0, u1 = [], []
    for i in range(n):
        for side, row in ((SRC, u0), (TGT, u1)):
            tops = []
            for route in range(1 << max(n - i - 1, 0)):
                cur = c
                for k in range(n - 1, i, -1):
                    cur = ctx._drop(cur, TGT if (route >> (k - i - 1)) & 1 else SRC)
                tops.append(ctx._drop(cur, side).top)
            if any(t != tops[0] for t in tops):
                return GCell(c.x, (), (), IntMatrix.zeros(0, 0))
            row.append(tops[0])
    return GCell(c.x, tuple(u0), tuple(u1), c.top)


def _composites(p: Polygraph) -> list:
    """Binary composites of generators (and their units) that are composable."""
    from .cellterm import cells_equivalent, unit as unit_term
    out = []
    gens = list(p)
    for n in range(1, p.max_dim + 1):
        cells = [Gen(g.name) for g in gens if g.dim == n] + \
            [unit_term(Gen(g.name), n - g.dim) for g in gens if g.dim < n]
        for i in range(n):
            for a in cells:
                for b in cells:
                    if isinstance(a, Id) and isinstance(b, Id):
                        continue
                    if cells_equivalent(boundary(b, i, TGT, p), boundary(a, i, SRC, p), p):
                        out.append(Comp(i, a, b))
    return out


# the category of elements


@dataclass
class SetFunctorData:
    """A set per object and, per 1-generator g, a map E_{t0 g} -> E_{s0 g}."""

    base: Polygraph
    sets: dict
    maps: dict

    def apply_word(self, word, a):
        # (g_k ... g_1)^* = g_1^* ... g_k^*: apply the written word left to right
        for g in word:
            a = self.maps[g][a]
        return a

    def apply(self, t: CellTerm, a):
        """t_1(t)^*(a) along the 1-target of a cell (or t itself in dim 1)."""
        one = t if dim(t, self.base) <= 1 else boundary(t, 1, TGT, self.base)
        return self.apply_word(normal_form_1(one, self.base).word, a)

    def check(self) -> ValidationReport:
        report = ValidationReport()
        p = self.base
        for g in p.cells(1):
            path = normal_form_1(Gen(g), p)
            f = self.maps.get(g)
            if f is None or set(f) != set(self.sets[path.tgt]) or \
                    not set(f.values()) <= set(self.sets[path.src]):
                report.add("BadMap", g, "map is not a function E_t -> E_s")
        if not report.ok:
            return report
        for b in p.cells(2):
            g = p[b]
            t = normal_form_1(g.tgt, p).tgt
            for a in self.sets[t]:
                x = self.apply_word(normal_form_1(g.src, p).word, a)
                y = self.apply_word(normal_form_1(g.tgt, p).word, a)
                if x != y:
                    report.add("NotFunctorial", b, f"{a} goes to {x} and {y}")
        return report


def lifted_name(b: str, a) -> str:
    return f"{b}[{a}]"


def lift(t: CellTerm, a, e: SetFunctorData) -> CellTerm:
    """The cell (t, a) of ∫E, a in E at the 0-target of t."""
    if isinstance(t, Gen):
        return Gen(lifted_name(t.name, a))
    if isinstance(t, Id):
        return Id(lift(t.inner, a, e))
    if t.i == 0:
        return Comp(0, lift(t.left, a, e), lift(t.right, e.apply(t.left, a), e))
    return Comp(t.i, lift(t.left, a, e), lift(t.right, a, e))


def grothendieck(x: Polygraph, e: SetFunctorData):
    """∫E as a polygraph, with its projection to X."""
    rep = e.check()
    if not rep.ok:
        raise ValueError(f"invalid set functor: {rep.violations[0].message}")
    q = Polygraph()
    images = {}
    for n in range(x.max_dim + 1):
        for b in x.cells(n):
            g = x[b]
            for a in e.sets[obj_tgt(Gen(b), x)]:
                name = lifted_name(b, a)
                images[name] = Gen(b)
                if n == 0:
                    q.add(name, 0)
                elif n == 1:
                    s = obj_src(Gen(b), x)
                    q.add(name, 1, Gen(lifted_name(s, e.maps[b][a])),
                          Gen(lifted_name(obj_tgt(Gen(b), x), a)))
                else:
                    q.add(name, n, lift(g.src, a, e), lift(g.tgt, a, e))
    return q, OmegaFunctorData(q, x, images)


def free_module_system(e: SetFunctorData) -> LocalSystemData:
    """M = Z[E]: permutation-like matrices A[g^*(a), a] = 1."""
    p = e.base
    groups = {x: PresentedGroup(len(e.sets[x])) for x in p.cells(0)}
    arrows = {}
    for g in p.cells(1):
        path = normal_form_1(Gen(g), p)
        src, tgt = e.sets[path.src], e.sets[path.tgt]
        rows = [[0] * len(tgt) for _ in src]
        for j, a in enumerate(tgt):
            rows[src.index(e.maps[g][a])][j] = 1
        arrows[g] = IntMatrix.from_rows(rows, len(tgt))
    return LocalSystemData(p, groups, arrows)


def abelianization_check(x: Polygraph, e: SetFunctorData) -> dict:
    """C(∫E, Z) against C(X, Z[E]) under (b, a) <-> basis vector a at b."""
    from .localsystem import constant_system
    q, proj = grothendieck(x, e)
    lhs = chain_complex(q, constant_system(q))
    rhs = chain_complex(x, free_module_system(e))
    ranks_ok = [g.generators for g in lhs.groups] == [g.generators for g in rhs.groups]
    diffs_ok = ranks_ok and lhs.differentials == rhs.differentials
    fibers_ok = all(len([n for n, v in proj.images.items() if v == Gen(b)])
                    == len(e.sets[obj_tgt(Gen(b), x)]) for b in x.generators)
    from .cellterm import check_functor, validate_polygraph
    return {"ok": bool(ranks_ok and diffs_ok and fibers_ok),
            "valid": validate_polygraph(q).ok,
            "projection": check_functor(proj).ok,
            "ranks": [g.generators for g in lhs.groups]}


def random_set_functor(x: Polygraph, rng: random.Random, max_size: int = 3,
                       tries: int = 200) -> SetFunctorData:
    """Random sets of size 1..max_size and maps satisfying the 2-cell constraints."""
    objs = x.cells(0)
    ones = x.cells(1)
    singles = {}
    for b in x.cells(2):
        g = x[b]
        for side, other in ((g.src, g.tgt), (g.tgt, g.src)):
            w = normal_form_1(side, x).word
            if len(w) == 1:
                singles.setdefault(w[0], []).append(normal_form_1(other, x).word)
    for _ in range(tries):
        sets = {o: [str(k) for k in range(rng.randint(1, max_size))] for o in objs}
        maps = {}
        order = [g for g in ones if g not in singles] + [g for g in ones if g in singles]
        for g in order:
            path = normal_form_1(Gen(g), x)
            forced = None
            for w in singles.get(g, []):
                if all(h in maps for h in w) and g not in w:
                    forced = w
                    break
            if forced is not None:
                e = SetFunctorData(x, sets, maps)
                maps[g] = {a: e.apply_word(forced, a) for a in sets[path.tgt]}
            else:
                maps[g] = {a: rng.choice(sets[path.src]) for a in sets[path.tgt]}
        e = SetFunctorData(x, sets, maps)
        if e.check().ok:
            return e
    raise ValueError("no consistent random set functor found")


def set_functor_to_json(e: SetFunctorData) -> dict:
    return {"sets": {k: list(v) for k, v in e.sets.items()},
            "maps": {g: dict(f) for g, f in e.maps.items()}}


def set_functor_from_json(obj, base: Polygraph) -> SetFunctorData:
    if not isinstance(obj, dict) or not isinstance(obj.get("sets"), dict):
        raise TermParseError("set functor must have a 'sets' table")
    return SetFunctorData(base, {k: [str(a) for a in v] for k, v in obj["sets"].items()},
                          {g: {str(k): str(v) for k, v in f.items()}
                           for g, f in obj.get("maps", {}).items()})
