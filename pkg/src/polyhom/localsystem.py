"""Weak local systems: an abelian group per object, a matrix per 1-cell.

``arrows[g]`` is the matrix of ``g^*: M_{t0 g} -> M_{s0 g}`` acting on
column vectors of generator coordinates. Values on composite 1-cells are
products taken contravariantly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cellterm import (CellTerm, Gen, OmegaFunctorData, Polygraph,
                       TermParseError, ValidationReport, normal_form_1)
from .zlinalg import (IntMatrix, PresentedGroup, ShapeMismatch, equal_maps,
                      is_isomorphism, maps_relations)


@dataclass
class LocalSystemData:
    base: Polygraph
    groups: dict
    arrows: dict = field(default_factory=dict)

    def group(self, obj: str) -> PresentedGroup:
        try:
            return self.groups[obj]
        except KeyError:
            raise ShapeMismatch(f"no coefficient group on object {obj!r}") from None

    def rank(self, obj: str) -> int:
        return self.group(obj).generators

    def evaluate(self, t: CellTerm) -> IntMatrix:
        return evaluate_on_1cell(self, t)

    def __eq__(self, other):
        return (isinstance(other, LocalSystemData) and self.groups == other.groups
                and self.arrows == other.arrows)


def constant_system(base: Polygraph, group: PresentedGroup | None = None) -> LocalSystemData:
    """Every object gets ``group`` (default Z), every 1-generator the identity."""
    group = group or PresentedGroup(1)
    r = group.generators
    return LocalSystemData(base, {x: group for x in base.cells(0)},
                           {g: IntMatrix.identity(r) for g in base.cells(1)})


def evaluate_word(m: LocalSystemData, word, obj: str) -> IntMatrix:
    """Matrix of a path given as a word in written order ending at ``obj``."""
    acc = IntMatrix.identity(m.rank(obj))
    # (g_k ... g_1)^* = g_1^* ... g_k^*
    for g in word:
        a = m.arrows.get(g)
        if a is None:
            raise ShapeMismatch(f"no matrix for 1-generator {g!r}")
        acc = a @ acc
    return acc


def evaluate_on_1cell(m: LocalSystemData, t: CellTerm) -> IntMatrix:
    path = normal_form_1(t, m.base)
    return evaluate_word(m, path.word, path.tgt)


def check_weak_local_system(m: LocalSystemData) -> ValidationReport:
    report = ValidationReport()
    p = m.base
    for x in p.cells(0):
        if x not in m.groups:
            report.add("MissingGroup", x, "object without a coefficient group")
    for name in m.groups:
        if name not in p or p[name].dim != 0:
            report.add("UnknownGenerator", name, "group on a non-object")
    for name in m.arrows:
        if name not in p or p[name].dim != 1:
            report.add("UnknownGenerator", name, "matrix on a non-1-generator")
    if not report.ok:
        return report
    for g in p.cells(1):
        if g not in m.arrows:
            report.add("MissingArrow", g, "1-generator without a matrix")
            continue
        path = normal_form_1(Gen(g), p)
        s, t = m.groups[path.src], m.groups[path.tgt]
        a = m.arrows[g]
        if a.shape != (s.generators, t.generators):
            report.add("ShapeMismatch", g,
                       f"matrix has shape {a.shape}, expected "
                       f"{(s.generators, t.generators)}")
        elif not maps_relations(a, t, s):
            report.add("RelationsNotPreserved", g, "matrix does not respect relations")
    if not report.ok:
        return report
    for b in p.cells(2):
        g = p[b]
        lhs = evaluate_on_1cell(m, g.src)
        rhs = evaluate_on_1cell(m, g.tgt)
        s0 = normal_form_1(g.src, p).src
        if not equal_maps(lhs, rhs, m.groups[s0]):
            report.add("NotFunctorial", b,
                       f"source evaluates to {lhs.to_rows()}, target to {rhs.to_rows()}")
    return report


def is_local_system(m: LocalSystemData) -> bool:
    """True iff every generating 1-cell acts invertibly (free bases)."""
    rep = check_weak_local_system(m)
    if not rep.ok:
        raise ShapeMismatch(f"not a weak local system: {rep.violations[0].message}")
    p = m.base
    for g in p.cells(1):
        path = normal_form_1(Gen(g), p)
        if not is_isomorphism(m.arrows[g], m.groups[path.tgt], m.groups[path.src]):
            return False
    return True


def pullback(m: LocalSystemData, f: OmegaFunctorData) -> LocalSystemData:
    groups = {}
    for x in f.source.cells(0):
        img = f.images[x]
        if not isinstance(img, Gen):
            raise ShapeMismatch(f"object {x!r} maps to a non-object {img}")
        groups[x] = m.group(img.name)
    arrows = {g: evaluate_on_1cell(m, f.images[g]) for g in f.source.cells(1)}
    return LocalSystemData(f.source, groups, arrows)


def natural_map_check(phi: dict, src: LocalSystemData, tgt: LocalSystemData) -> ValidationReport:
    """Whether ``phi_x: src_x -> tgt_x`` commutes with every 1-generator."""
    report = ValidationReport()
    p = src.base
    for x in p.cells(0):
        f = phi.get(x)
        if f is None or f.shape != (tgt.rank(x), src.rank(x)):
            report.add("ShapeMismatch", x, "missing or misshapen component")
        elif not maps_relations(f, src.group(x), tgt.group(x)):
            report.add("RelationsNotPreserved", x, "component does not respect relations")
    if not report.ok:
        return report
    for g in p.cells(1):
        path = normal_form_1(Gen(g), p)
        lhs = phi[path.src] @ src.arrows[g]
        rhs = tgt.arrows[g] @ phi[path.tgt]
        if not equal_maps(lhs, rhs, tgt.group(path.src)):
            report.add("NotNatural", g, "square does not commute")
    return report


# finite categories


@dataclass
class FiniteCategoryData:
    """A finite category with an explicit composition table.

    ``compose[(g, f)]`` is ``g ∘ f`` (first ``f``, then ``g``).
    """

    objects: list
    morphisms: dict          # name -> (src, tgt)
    identities: dict         # object -> identity morphism name
    compose: dict

    def src(self, f):
        return self.morphisms[f][0]

    def tgt(self, f):
        return self.morphisms[f][1]

    def is_identity(self, f) -> bool:
        return self.identities.get(self.src(f)) == f

    def non_identities(self) -> list:
        ids = set(self.identities.values())
        return [f for f in self.morphisms if f not in ids]

    def check(self) -> ValidationReport:
        report = ValidationReport()
        for x in self.objects:
            i = self.identities.get(x)
            if i is None or self.morphisms.get(i) != (x, x):
                report.add("BadIdentity", str(x), "missing or misplaced identity")
        if not report.ok:
            return report
        ms = list(self.morphisms)
        for f in ms:
            for g in ms:
                if self.tgt(f) != self.src(g):
                    continue
                h = self.compose.get((g, f))
                if h is None:
                    report.add("MissingComposite", f"{g}∘{f}", "composition table incomplete")
                elif self.morphisms.get(h) != (self.src(f), self.tgt(g)):
                    report.add("BadComposite", f"{g}∘{f}", "composite has wrong endpoints")
        if not report.ok:
            return report
        for f in ms:
            if self.compose[(self.identities[self.tgt(f)], f)] != f or \
                    self.compose[(f, self.identities[self.src(f)])] != f:
                report.add("UnitLaw", f, "identity is not neutral")
            for g in ms:
                if self.tgt(f) != self.src(g):
                    continue
                for h in ms:
                    if self.tgt(g) != self.src(h):
                        continue
                    a = self.compose[(h, self.compose[(g, f)])]
                    b = self.compose[(self.compose[(h, g)], f)]
                    if a != b:
                        report.add("Associativity", f"{h},{g},{f}", "not associative")
        return report

    @classmethod
    def from_group(cls, elements: list, mult, unit, obj="*") -> "FiniteCategoryData":
        """One-object category of a finite group; ``mult(g, f)`` is g∘f."""
        return cls([obj], {e: (obj, obj) for e in elements}, {obj: unit},
                   {(g, f): mult(g, f) for g in elements for f in elements})

    @classmethod
    def from_poset(cls, elements: list, leq) -> "FiniteCategoryData":
        morphisms, identities, compose = {}, {}, {}
        for a in elements:
            for b in elements:
                if leq(a, b):
                    morphisms[f"{a}<{b}"] = (a, b)
            identities[a] = f"{a}<{a}"
        for f, (a, b) in morphisms.items():
            for g, (b2, c) in morphisms.items():
                if b == b2:
                    compose[(g, f)] = f"{a}<{c}"
        return cls(list(elements), morphisms, identities, compose)


def check_category_system(c: FiniteCategoryData, groups: dict, arrows: dict) -> ValidationReport:
    """Functoriality of a contravariant system on the full composition table."""
    report = ValidationReport()
    for f, (s, t) in c.morphisms.items():
        a = arrows.get(f)
        if a is None:
            if c.is_identity(f):
                continue
            report.add("MissingArrow", f, "morphism without a matrix")
        elif a.shape != (groups[s].generators, groups[t].generators):
            report.add("ShapeMismatch", f, "matrix of wrong shape")
    if not report.ok:
        return report

    def mat(f):
        if f in arrows:
            return arrows[f]
        return IntMatrix.identity(groups[c.src(f)].generators)

    for x in c.objects:
        i = c.identities[x]
        if not equal_maps(mat(i), IntMatrix.identity(groups[x].generators), groups[x]):
            report.add("UnitLaw", i, "identity does not act as the identity")
    for (g, f), h in c.compose.items():
        # (g∘f)^* = f^* g^*
        if not equal_maps(mat(h), mat(f) @ mat(g), groups[c.src(f)]):
            report.add("NotFunctorial", f"{g}∘{f}", "composite matrix mismatch")
    return report


# JSON


def _matrix_from_rows(rows, nrows, ncols) -> IntMatrix:
    if not isinstance(rows, list) or len(rows) != nrows:
        raise TermParseError(f"expected {nrows} matrix rows, got {rows!r}")
    for r in rows:
        if not isinstance(r, list) or len(r) != ncols or \
                not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise TermParseError(f"bad matrix row {r!r}")
    return IntMatrix(nrows, ncols, [x for r in rows for x in r])


def group_to_json(g: PresentedGroup) -> dict:
    return {"rank": g.generators, "relations": g.relations.to_rows()}


def group_from_json(obj) -> PresentedGroup:
    if not isinstance(obj, dict) or not isinstance(obj.get("rank"), int):
        raise TermParseError(f"bad group {obj!r}")
    r = obj["rank"]
    rows = obj.get("relations", [[] for _ in range(r)])
    if r == 0:
        return PresentedGroup(0, IntMatrix.zeros(0, 0))
    ncols = len(rows[0]) if rows and isinstance(rows[0], list) else 0
    return PresentedGroup(r, _matrix_from_rows(rows, r, ncols))


def system_to_json(m: LocalSystemData) -> dict:
    return {"groups": {x: group_to_json(g) for x, g in m.groups.items()},
            "arrows": {g: a.to_rows() for g, a in m.arrows.items()}}


def system_from_json(obj, base: Polygraph) -> LocalSystemData:
    if not isinstance(obj, dict) or not isinstance(obj.get("groups"), dict):
        raise TermParseError("local system must have a 'groups' table")
    groups = {x: group_from_json(g) for x, g in obj["groups"].items()}
    arrows = {}
    for g, rows in obj.get("arrows", {}).items():
        if g not in base or base[g].dim != 1:
            raise TermParseError(f"arrow on unknown 1-generator {g!r}")
        path = normal_form_1(Gen(g), base)
        if path.src not in groups or path.tgt not in groups:
            raise TermParseError(f"arrow {g!r} between objects without groups")
        arrows[g] = _matrix_from_rows(rows, groups[path.src].generators,
                                      groups[path.tgt].generators)
    return LocalSystemData(base, groups, arrows)


def load_system(path, base: Polygraph) -> LocalSystemData:
    with open(path, encoding="utf-8") as fh:
        return system_from_json(json.load(fh), base)
