"""The complex C(P, M) of a polygraph with coefficients in a weak local system.

Degree n is the direct sum, over the n-generators b of P, of the group
sitting at the 0-target of b. A composite cell is sent to a sum of
generators by ``cls``, which applies the abelianization relations
recursively:

    [a *_0 b, m] = [a, m] + [b, (t_1 a)^* m]
    [a *_i b, m] = [a, m] + [b, m]          (i > 0)
    [1_u, m]     = 0
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cellterm import (CellTerm, Gen, Id, OmegaFunctorData, Polygraph,
                       SRC, TGT, ValidationReport, apply_functor, boundary,
                       cells_equivalent, comp, dim, normal_form_1, obj_tgt,
                       CellTermError, check_term)
from .localsystem import (LocalSystemData, check_weak_local_system, evaluate_on_1cell,
                          natural_map_check,
                          pullback)
from .zlinalg import (ChainComplex, ChainMap, IntMatrix, PresentedGroup,
                      ShapeMismatch, equal_maps, homology_of_complex)


class CommutationFailure(ValueError):
    pass


class NaturalityFailure(ValueError):
    pass


def _add_into(acc: dict, other: dict):
    for k, v in other.items():
        if k in acc:
            acc[k] = tuple(a + b for a, b in zip(acc[k], v))
        else:
            acc[k] = tuple(v)


def cls(p: Polygraph, m: LocalSystemData, t: CellTerm, coeff) -> dict:
    """Class of ``(t, coeff)`` as a map generator name -> coefficient vector.

    ``coeff`` is a vector in the free cover of the group at the 0-target of
    ``t``. Zero vectors are dropped from the result.
    """
    n = dim(t, p)
    coeff = tuple(coeff)
    want = m.rank(obj_tgt(t, p))
    if len(coeff) != want:
        raise ShapeMismatch(f"coefficient of length {len(coeff)}, expected {want}")
    out: dict = {}
    _cls(p, m, t, n, coeff, out)
    return {k: v for k, v in out.items() if any(v)}


def _cls(p, m, t, n, coeff, out):
    if not any(coeff):
        return
    if isinstance(t, Gen):
        if p[t.name].dim == n:
            _add_into(out, {t.name: coeff})
        return
    if isinstance(t, Id):
        return
    if t.i == 0:
        _cls(p, m, t.left, n, coeff, out)
        twist = evaluate_on_1cell(m, boundary(t.left, 1, TGT, p)) if n >= 1 else None
        _cls(p, m, t.right, n, twist.apply(coeff), out)
    else:
        _cls(p, m, t.left, n, coeff, out)
        _cls(p, m, t.right, n, coeff, out)


class Basis:
    """Ordered basis of C_n: pairs (generator, coordinate index)."""

    def __init__(self, p: Polygraph, m: LocalSystemData, n: int):
        self.n = n
        self.gens = p.cells(n)
        self.offsets = {}
        self.ranks = {}
        self.groups = []
        off = 0
        for b in self.gens:
            g = m.group(obj_tgt(Gen(b), p))
            self.offsets[b] = off
            self.ranks[b] = g.generators
            self.groups.append(g)
            off += g.generators
        self.size = off

    def group(self) -> PresentedGroup:
        return PresentedGroup.direct_sum(self.groups)

    def labels(self) -> list:
        return [(b, j) for b in self.gens for j in range(self.ranks[b])]

    def flatten(self, element: dict) -> tuple:
        v = [0] * self.size
        for b, vec in element.items():
            off = self.offsets[b]
            for j, x in enumerate(vec):
                v[off + j] += x
        return tuple(v)

    def unit_vectors(self):
        for b in self.gens:
            r = self.ranks[b]
            for j in range(r):
                yield b, tuple(int(k == j) for k in range(r))


def _differential(p, m, src: Basis, tgt: Basis) -> IntMatrix:
    cols = []
    for b, e in src.unit_vectors():
        g = p[b]
        if src.n == 1:
            path = normal_form_1(Gen(b), p)
            elem = {path.tgt: e}
            _add_into(elem, {path.src: tuple(-x for x in m.arrows[b].apply(e))})
        else:
            elem = cls(p, m, g.tgt, e)
            _add_into(elem, {k: tuple(-x for x in v)
                             for k, v in cls(p, m, g.src, e).items()})
        cols.append(tgt.flatten(elem))
    return IntMatrix.from_columns(cols, tgt.size)


def chain_complex(p: Polygraph, m: LocalSystemData, check: bool = True) -> ChainComplex:
    """C(P, M), degrees 0 .. max_dim, bases in generator table order."""
    top = p.max_dim
    bases = [Basis(p, m, n) for n in range(top + 1)]
    diffs = [_differential(p, m, bases[n], bases[n - 1]) for n in range(1, top + 1)]
    c = ChainComplex([b.group() for b in bases], diffs,
                     labels=[b.labels() for b in bases])
    c.bases = bases
    if check:
        c.check()
    return c


def polygraphic_homology(p: Polygraph, m: LocalSystemData, degrees: int | None = None):
    return homology_of_complex(chain_complex(p, m), degrees)


def _bases(c: ChainComplex, p, m):
    bases = getattr(c, "bases", None)
    if bases is None:
        bases = [Basis(p, m, n) for n in range(p.max_dim + 1)]
    return bases


def _basis(bases, n, p, m):
    return bases[n] if n < len(bases) else Basis(p, m, n)


def induced_chain_map(f: OmegaFunctorData, m: LocalSystemData,
                      source: ChainComplex | None = None,
                      target: ChainComplex | None = None,
                      check: bool = True) -> ChainMap:
    """C(f, M): C(P', f^*M) -> C(P, M), sending (b, v) to cls(f(b), v)."""
    mp = pullback(m, f)
    source = source or chain_complex(f.source, mp)
    target = target or chain_complex(f.target, m)
    sb = _bases(source, f.source, mp)
    tb = _bases(target, f.target, m)
    comps = []
    for n in range(source.top + 1):
        src_b, tgt_b = sb[n], _basis(tb, n, f.target, m)
        cols = [tgt_b.flatten(cls(f.target, m, f.images[b], e))
                for b, e in src_b.unit_vectors()]
        comps.append(IntMatrix.from_columns(cols, tgt_b.size))
    fm = ChainMap(source, target, comps)
    if check:
        bad = fm.commutation_defect()
        if bad is not None:
            raise CommutationFailure(f"induced map fails to commute in degree {bad}")
    return fm


def coefficient_chain_map(p: Polygraph, phi: dict, m_src: LocalSystemData,
                          m_tgt: LocalSystemData,
                          source: ChainComplex | None = None,
                          target: ChainComplex | None = None) -> ChainMap:
    """C(P, phi): block-diagonal action of ``phi`` at the 0-target of each cell."""
    rep = natural_map_check(phi, m_src, m_tgt)
    if not rep.ok:
        v = rep.violations[0]
        raise NaturalityFailure(f"{v.location}: {v.message}")
    source = source or chain_complex(p, m_src)
    target = target or chain_complex(p, m_tgt)
    comps = []
    for n in range(source.top + 1):
        blocks = [phi[obj_tgt(Gen(b), p)] for b in p.cells(n)]
        comps.append(IntMatrix.block_diag(blocks) if blocks
                     else IntMatrix.zeros(target.rank(n), 0))
    return ChainMap(source, target, comps)


# oplax transformations


@dataclass
class OplaxData:
    """An oplax transformation ``f0 => f1`` given on generators."""

    f0: OmegaFunctorData
    f1: OmegaFunctorData
    alpha: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def source(self) -> Polygraph:
        return self.f0.source

    @property
    def target(self) -> Polygraph:
        return self.f0.target


def extend_oplax(a: OplaxData, t: CellTerm) -> CellTerm:
    """The (n+1)-cell alpha_t of an n-cell term ``t`` of the source."""
    hit = a._cache.get(t)
    if hit is not None:
        return hit
    P, Q = a.source, a.target
    if isinstance(t, Gen):
        try:
            out = a.alpha[t.name]
        except KeyError:
            raise CellTermError(f"oplax datum has no cell for {t.name!r}") from None
    elif isinstance(t, Id):
        out = Id(extend_oplax(a, t.inner))
    else:
        i, x1, x0 = t.i, t.left, t.right
        # f1(t_{i+1} x1) *_0 alpha_{s_0} *_1 ... *_{i-1} alpha_{s_{i-1}} *_i alpha_{x0}
        left = a.f1(boundary(x1, i + 1, TGT, P))
        for k in range(i):
            left = comp(k, left, extend_oplax(a, boundary(x0, k, SRC, P)), Q)
        left = comp(i, left, extend_oplax(a, x0), Q)
        # alpha_{x1} *_i alpha_{t_{i-1}} *_{i-1} ... *_1 alpha_{t_0} *_0 f0(s_{i+1} x0)
        right = a.f0(boundary(x0, i + 1, SRC, P))
        for k in range(i):
            right = comp(k, extend_oplax(a, boundary(x1, k, TGT, P)), right, Q)
        right = comp(i, extend_oplax(a, x1), right, Q)
        out = comp(i + 1, left, right, Q)
    a._cache[t] = out
    return out


def oplax_boundary(a: OplaxData, x: CellTerm, side: str) -> CellTerm:
    """Expected n-source or n-target of alpha_x for an n-cell ``x``."""
    P, Q = a.source, a.target
    n = dim(x, P)
    if side == SRC:
        acc = a.f0(x)
        for k in range(n):
            acc = comp(k, extend_oplax(a, boundary(x, k, TGT, P)), acc, Q)
        return acc
    acc = a.f1(x)
    for k in range(n):
        acc = comp(k, acc, extend_oplax(a, boundary(x, k, SRC, P)), Q)
    return acc


def check_oplax(a: OplaxData) -> ValidationReport:
    report = ValidationReport()
    P, Q = a.source, a.target
    for g in P:
        if g.name not in a.alpha:
            report.add("UnknownGenerator", g.name, "no oplax cell")
            continue
        d = check_term(a.alpha[g.name], Q, report, g.name)
        if d is None:
            continue
        if d != g.dim + 1:
            report.add("DimensionMismatch", g.name,
                       f"oplax cell has dimension {d}, expected {g.dim + 1}")
            continue
        for side in (SRC, TGT):
            try:
                want = oplax_boundary(a, Gen(g.name), side)
                got = boundary(a.alpha[g.name], g.dim, side, Q)
                ok = cells_equivalent(got, want, Q)
            except CellTermError as e:
                report.add(e.kind, g.name, str(e))
                continue
            if not ok:
                report.add("EndpointMismatch", g.name,
                           f"{side} of oplax cell is {got}, expected {want}")
    return report


def oplax_phi(a: OplaxData, m: LocalSystemData) -> dict:
    """phi_x = (alpha_x)^*: M_{f1 x} -> M_{f0 x} on objects of the source."""
    return {x: evaluate_on_1cell(m, a.alpha[x]) for x in a.source.cells(0)}


@dataclass
class HomotopyResult:
    h: list              # h[n]: C_n(P, f1^*M) -> C_{n+1}(Q, M)
    residual: list       # per degree, dh + hd - (C(f1) - C(f0, phi))
    source: ChainComplex
    target: ChainComplex

    @property
    def is_zero(self) -> bool:
        return all(equal_maps(r, IntMatrix.zeros(*r.shape), self.target.group(n))
                   for n, r in enumerate(self.residual))

    def first_nonzero(self):
        for n, r in enumerate(self.residual):
            if not equal_maps(r, IntMatrix.zeros(*r.shape), self.target.group(n)):
                return n
        return None


def homotopy_from_oplax(a: OplaxData, m: LocalSystemData) -> HomotopyResult:
    P, Q = a.source, a.target
    m1 = pullback(m, a.f1)
    m0 = pullback(m, a.f0)
    src = chain_complex(P, m1)
    tgt = chain_complex(Q, m)
    sb = src.bases
    top = src.top
    h = []
    for n in range(top + 1):
        tb = _basis(tgt.bases, n + 1, Q, m)
        cols = [tb.flatten(cls(Q, m, extend_oplax(a, Gen(b)), e))
                for b, e in sb[n].unit_vectors()]
        h.append(IntMatrix.from_columns(cols, tb.size))
    cf1 = induced_chain_map(a.f1, m, source=src, target=tgt, check=False)
    mid = chain_complex(P, m0)
    cf0 = induced_chain_map(a.f0, m, source=mid, target=tgt, check=False)
    cphi = coefficient_chain_map(P, oplax_phi(a, m), m1, m0, source=src, target=mid)
    diff = cf1 - (cf0 @ cphi)
    residual = []
    for n in range(top + 1):
        r = tgt.d(n + 1) @ h[n]
        if n >= 1:
            r = r + h[n - 1] @ src.d(n)
        residual.append(r - diff.component(n))
    return HomotopyResult(h, residual, src, tgt)


def identity_oplax(p: Polygraph) -> OplaxData:
    """The identity transformation of the identity functor: all units."""
    f = OmegaFunctorData.identity(p)
    return OplaxData(f, f, {g.name: Id(Gen(g.name)) for g in p})


def cylinder(p: Polygraph, tag0="0", tag1="1", tag_alpha="α") -> tuple:
    """The Gray cylinder on ``p`` with its two inclusions and oplax datum.

    Generators of the cylinder are the copies ``g.0``, ``g.1`` and one
    cell ``g.α`` of dimension one more for every generator ``g``. Returns
    ``(Q, OplaxData)`` where the datum goes from copy 0 to copy 1.
    """
    q = Polygraph()
    f0 = OmegaFunctorData(p, q, {})
    f1 = OmegaFunctorData(p, q, {})
    a = OplaxData(f0, f1, {})

    def name(g, tag):
        return f"{g}.{tag}"

    for n in range(p.max_dim + 1):
        for g in p:
            if g.dim != n:
                continue
            for tag, f in ((tag0, f0), (tag1, f1)):
                if n == 0:
                    q.add(name(g.name, tag), 0)
                else:
                    q.add(name(g.name, tag), n, apply_functor(f, g.src),
                          apply_functor(f, g.tgt))
                f.images[g.name] = Gen(name(g.name, tag))
        for g in p:
            if g.dim != n:
                continue
            s = oplax_boundary(a, Gen(g.name), SRC)
            t = oplax_boundary(a, Gen(g.name), TGT)
            q.add(name(g.name, tag_alpha), n + 1, s, t)
            a.alpha[g.name] = Gen(name(g.name, tag_alpha))
    a._cache.clear()
    return q, a


def random_cylinder_system(a: OplaxData, rng, lo: int = -2, hi: int = 2,
                           tries: int = 200) -> LocalSystemData:
    """A random 1x1 weak system on the target of a cylinder datum.

    Every object x of the base gets a scalar c_x, put on the cell alpha_x.
    A free 1-generator e: s -> t gets k_e, with e.0 acting by c_s k_e and
    e.1 by c_t k_e. A 1-generator that is the lone source or target of a
    2-generator is forced to the product along the other side, in both
    copies. The alpha 2-cells then hold by telescoping.
    """
    P, Q = a.source, a.target
    forced = {}
    for b in P.cells(2):
        g = P[b]
        for side, other in ((g.src, g.tgt), (g.tgt, g.src)):
            w = normal_form_1(side, P).word
            if len(w) == 1 and w[0] not in forced:
                forced[w[0]] = normal_form_1(other, P).word
    z = PresentedGroup(1)
    for _ in range(tries):
        c = {x: rng.randint(lo, hi) for x in P.cells(0)}
        k0, k1 = {}, {}
        todo = list(P.cells(1))
        while todo:
            progress = False
            for e in list(todo):
                path = normal_form_1(Gen(e), P)
                w = forced.get(e)
                if w is None:
                    k = rng.randint(lo, hi)
                    k0[e], k1[e] = c[path.src] * k, c[path.tgt] * k
                elif all(h in k0 for h in w):
                    p0 = p1 = 1
                    for h in w:
                        p0, p1 = p0 * k0[h], p1 * k1[h]
                    k0[e], k1[e] = p0, p1
                else:
                    continue
                todo.remove(e)
                progress = True
            if not progress:
                forced.pop(todo[0])
        arrows = {}
        for e in P.cells(1):
            arrows[a.f0.images[e].name] = IntMatrix.scalar(1, k0[e])
            arrows[a.f1.images[e].name] = IntMatrix.scalar(1, k1[e])
        for x in P.cells(0):
            arrows[a.alpha[x].name] = IntMatrix.scalar(1, c[x])
        m = LocalSystemData(Q, {x: z for x in Q.cells(0)}, arrows)
        if check_weak_local_system(m).ok:
            return m
    raise ValueError("no consistent random cylinder system found")


def oplax_to_json(a: OplaxData) -> dict:
    from .cellterm import functor_to_json, polygraph_to_json, term_to_json
    return {"source": polygraph_to_json(a.source),
            "target": polygraph_to_json(a.target),
            "f0": functor_to_json(a.f0)["images"],
            "f1": functor_to_json(a.f1)["images"],
            "alpha": {g: term_to_json(t) for g, t in a.alpha.items()}}


def oplax_from_json(obj) -> OplaxData:
    from .cellterm import (TermParseError, functor_from_json, polygraph_from_json,
                           term_from_json, _pad_loaded)
    try:
        p = polygraph_from_json(obj["source"])
        q = polygraph_from_json(obj["target"])
        f0 = functor_from_json({"images": obj["f0"]}, p, q)
        f1 = functor_from_json({"images": obj["f1"]}, p, q)
        alpha = {g: _pad_loaded(term_from_json(t), q) for g, t in obj["alpha"].items()}
    except (KeyError, TypeError) as e:
        raise TermParseError(f"bad oplax datum: {e}") from None
    return OplaxData(f0, f1, alpha)
