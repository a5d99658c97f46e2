"""Cells of free strict omega-categories, written as terms over a polygraph.

A term is a binary tree built from generators, units and i-compositions.
``Comp(i, a, b)`` is ``a *_i b``: ``a`` comes after ``b``.

Equality of cells is not decided in general. Two terms are compared with a
sound necessary criterion: exact paths in dimensions 0 and 1, and equal
constant-Z classes (plus matching lower boundaries) above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

SRC = "src"
TGT = "tgt"


class CellTermError(ValueError):
    kind = "Error"


class UnknownGenerator(CellTermError, KeyError):
    kind = "UnknownGenerator"

    def __str__(self):
        return ValueError.__str__(self)


class LevelOutOfRange(CellTermError):
    kind = "LevelOutOfRange"


class EndpointMismatch(CellTermError):
    kind = "EndpointMismatch"


class DimensionMismatch(CellTermError):
    kind = "DimensionMismatch"


class TermParseError(CellTermError):
    kind = "ParseError"


# terms


@dataclass(frozen=True)
class Gen:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Id:
    inner: "CellTerm"

    def __str__(self):
        return f"1({self.inner})"


@dataclass(frozen=True)
class Comp:
    i: int
    left: "CellTerm"
    right: "CellTerm"

    def __str__(self):
        return f"({self.left} *{self.i} {self.right})"


CellTerm = Union[Gen, Id, Comp]


def unit(t: CellTerm, times: int = 1) -> CellTerm:
    for _ in range(times):
        t = Id(t)
    return t


@dataclass(frozen=True)
class Generator:
    name: str
    dim: int
    src: CellTerm | None = None
    tgt: CellTerm | None = None


class Polygraph:
    """A finite polygraph: generators with source and target terms.

    Generator order is kept as given; it fixes the basis order of the
    chain complexes built on top.
    """

    def __init__(self, generators: Iterable[Generator] = ()):
        self.generators: dict[str, Generator] = {}
        self.duplicates: list[str] = []
        for g in generators:
            if g.name in self.generators:
                self.duplicates.append(g.name)
                continue
            self.generators[g.name] = g

    def __getitem__(self, name) -> Generator:
        try:
            return self.generators[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r}") from None

    def __contains__(self, name):
        return name in self.generators

    def __iter__(self):
        return iter(self.generators.values())

    def __len__(self):
        return len(self.generators)

    @property
    def max_dim(self) -> int:
        return max((g.dim for g in self), default=-1)

    def cells(self, n: int) -> list:
        """Names of the n-dimensional generators, in table order."""
        return [g.name for g in self if g.dim == n]

    def add(self, name, dim, src=None, tgt=None) -> Gen:
        if dim > 0 and src is not None:
            src = pad(src, dim - 1, self)
            tgt = pad(tgt, dim - 1, self)
        g = Generator(name, dim, src, tgt)
        if name in self.generators:
            self.duplicates.append(name)
        else:
            self.generators[name] = g
        return Gen(name)

    def truncate(self, n: int) -> "Polygraph":
        return Polygraph(g for g in self if g.dim <= n)

    def __eq__(self, other):
        return (isinstance(other, Polygraph)
                and list(self.generators.values()) == list(other.generators.values()))

    def __repr__(self):
        counts = [len(self.cells(n)) for n in range(self.max_dim + 1)]
        return f"Polygraph(cells per dim={counts})"


def dim(t: CellTerm, p: Polygraph) -> int:
    if isinstance(t, Gen):
        return p[t.name].dim
    if isinstance(t, Id):
        return dim(t.inner, p) + 1
    if isinstance(t, Comp):
        da, db = dim(t.left, p), dim(t.right, p)
        if da != db:
            raise DimensionMismatch(f"composite of cells of dims {da} and {db}: {t}")
        return da
    raise TypeError(f"not a cell term: {t!r}")


def pad(t: CellTerm, n: int, p: Polygraph) -> CellTerm:
    """Wrap ``t`` in units until it has dimension ``n``."""
    d = dim(t, p)
    if d > n:
        raise DimensionMismatch(f"cannot pad a {d}-cell down to dimension {n}")
    return unit(t, n - d)


def comp(i: int, a: CellTerm, b: CellTerm, p: Polygraph) -> Comp:
    """``a *_i b`` with the lower-dimensional factor padded by units."""
    n = max(dim(a, p), dim(b, p))
    if i >= n:
        raise LevelOutOfRange(f"*_{i} of cells of dimension {n}")
    return Comp(i, pad(a, n, p), pad(b, n, p))


def comp_chain(p: Polygraph, *factors) -> CellTerm:
    """Left-nested composite ``(((f0 *_{i1} f1) *_{i2} f2) ...)``.

    ``factors`` alternates terms and levels: ``t0, i1, t1, i2, t2, ...``.
    """
    acc = factors[0]
    for k in range(1, len(factors), 2):
        acc = comp(factors[k], acc, factors[k + 1], p)
    return acc


def boundary(t: CellTerm, k: int, side: str, p: Polygraph) -> CellTerm:
    """The k-source (``side='src'``) or k-target of ``t``."""
    if side not in (SRC, TGT):
        raise ValueError(f"side must be 'src' or 'tgt', not {side!r}")
    n = dim(t, p)
    if k < 0 or k > n:
        raise LevelOutOfRange(f"level {k} for a {n}-cell")
    return _boundary(t, k, side, n, p)


def _boundary(t, k, side, n, p):
    if k == n:
        return t
    if isinstance(t, Gen):
        g = p[t.name]
        inner = g.src if side == SRC else g.tgt
        return _boundary(inner, k, side, n - 1, p)
    if isinstance(t, Id):
        return _boundary(t.inner, k, side, n - 1, p)
    if k <= t.i:
        if side == SRC:
            return _boundary(t.right, k, side, n, p)
        return _boundary(t.left, k, side, n, p)
    return Comp(t.i, _boundary(t.left, k, side, n, p),
                _boundary(t.right, k, side, n, p))


def src(t, p, k=None):
    return boundary(t, dim(t, p) - 1 if k is None else k, SRC, p)


def tgt(t, p, k=None):
    return boundary(t, dim(t, p) - 1 if k is None else k, TGT, p)


def obj_src(t, p) -> str:
    """Name of the 0-source object."""
    return boundary(t, 0, SRC, p).name


def obj_tgt(t, p) -> str:
    return boundary(t, 0, TGT, p).name


class Path(NamedTuple):
    """Normal form of a cell of dimension at most 1."""

    word: tuple
    src: str
    tgt: str


def normal_form_1(t: CellTerm, p: Polygraph) -> Path:
    """Generator word of a 1-cell, in written (composition) order.

    Raises EndpointMismatch when a 0-composite is not composable.
    """
    d = dim(t, p)
    if d > 1:
        raise LevelOutOfRange(f"normal_form_1 of a {d}-cell")
    return _nf1(t, p)


def _nf1(t, p) -> Path:
    if isinstance(t, Gen):
        g = p[t.name]
        if g.dim == 0:
            return Path((), t.name, t.name)
        s, e = _nf1(g.src, p), _nf1(g.tgt, p)
        return Path((t.name,), s.src, e.tgt)
    if isinstance(t, Id):
        x = _nf1(t.inner, p)
        return Path((), x.src, x.tgt)
    a, b = _nf1(t.left, p), _nf1(t.right, p)
    if b.tgt != a.src:
        raise EndpointMismatch(
            f"cannot compose {t.left} after {t.right}: {b.tgt} != {a.src}")
    return Path(a.word + b.word, b.src, a.tgt)


def abelian_class(t: CellTerm, p: Polygraph) -> dict:
    """Constant-Z class of ``t``: generator multiplicities, units dropped."""
    out: dict = {}
    _abelian(t, p, out, 1)
    return {k: v for k, v in out.items() if v}


def _abelian(t, p, out, sign):
    if isinstance(t, Gen):
        out[t.name] = out.get(t.name, 0) + sign
    elif isinstance(t, Comp):
        _abelian(t.left, p, out, sign)
        _abelian(t.right, p, out, sign)


def cells_equivalent(a: CellTerm, b: CellTerm, p: Polygraph) -> bool:
    """The comparison relation used throughout validation.

    Exact paths in dimension <= 1. Above, equal constant-Z classes and
    equivalent boundaries at every lower level.
    """
    try:
        da, db = dim(a, p), dim(b, p)
        if da != db:
            return False
        if da <= 1:
            return normal_form_1(a, p) == normal_form_1(b, p)
        if abelian_class(a, p) != abelian_class(b, p):
            return False
        for k in range(da):
            for side in (SRC, TGT):
                x, y = boundary(a, k, side, p), boundary(b, k, side, p)
                if k <= 1:
                    if normal_form_1(x, p) != normal_form_1(y, p):
                        return False
                elif abelian_class(x, p) != abelian_class(y, p):
                    return False
        return True
    except CellTermError:
        return False


# validation


@dataclass
class Violation:
    kind: str
    location: str
    message: str

    def to_json(self):
        return {"kind": self.kind, "location": self.location, "message": self.message}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, location, message):
        self.violations.append(Violation(kind, location, message))

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def extend(self, other: "ValidationReport"):
        self.violations.extend(other.violations)

    def to_json(self):
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}

    def __bool__(self):
        return self.ok


def check_term(t: CellTerm, p: Polygraph, report: ValidationReport, where: str):
    """Record every malformed subterm of ``t``; return its dimension or None."""
    if isinstance(t, Gen):
        if t.name not in p:
            report.add("UnknownGenerator", where, f"unknown generator {t.name!r}")
            return None
        return p[t.name].dim
    if isinstance(t, Id):
        d = check_term(t.inner, p, report, where)
        return None if d is None else d + 1
    if not isinstance(t, Comp):
        report.add("ParseError", where, f"not a cell term: {t!r}")
        return None
    da = check_term(t.left, p, report, where)
    db = check_term(t.right, p, report, where)
    if da is None or db is None:
        return None
    if da != db:
        report.add("DimensionMismatch", where,
                   f"*_{t.i} of a {da}-cell and a {db}-cell in {t}")
        return None
    if not 0 <= t.i < da:
        report.add("LevelOutOfRange", where, f"*_{t.i} of {da}-cells in {t}")
        return None
    try:
        ok = cells_equivalent(boundary(t.right, t.i, TGT, p),
                              boundary(t.left, t.i, SRC, p), p)
    except CellTermError as e:
        report.add(e.kind, where, str(e))
        return None
    if not ok:
        report.add("EndpointMismatch", where,
                   f"{t.left} *_{t.i} {t.right} is not composable")
        return None
    return da


def _constant_d(c: dict, p: Polygraph) -> dict:
    """Constant-Z differential of a class of n-generators."""
    out: dict = {}
    for name, k in c.items():
        g = p[name]
        if g.dim == 0:
            continue
        if g.dim == 1:
            terms = {obj_tgt(Gen(name), p): 1}
            s = obj_src(Gen(name), p)
            terms[s] = terms.get(s, 0) - 1
        else:
            terms = dict(abelian_class(g.tgt, p))
            for x, v in abelian_class(g.src, p).items():
                terms[x] = terms.get(x, 0) - v
        for x, v in terms.items():
            out[x] = out.get(x, 0) + k * v
    return {x: v for x, v in out.items() if v}


def _leaves(t: CellTerm, out: set) -> set:
    if isinstance(t, Gen):
        out.add(t.name)
    elif isinstance(t, Id):
        _leaves(t.inner, out)
    elif isinstance(t, Comp):
        _leaves(t.left, out)
        _leaves(t.right, out)
    return out


def validate_polygraph(p: Polygraph) -> ValidationReport:
    report = ValidationReport()
    for name in p.duplicates:
        report.add("DuplicateName", name, f"generator {name!r} defined twice")
    broken = set()
    for g in sorted(p, key=lambda g: g.dim):
        before = len(report.violations)
        _validate_generator(g, p, report, broken)
        if len(report.violations) > before:
            broken.add(g.name)
    return report


def _validate_generator(g, p, report, broken):
    if g.dim < 0:
        report.add("DimensionMismatch", g.name, "negative dimension")
        return
    if g.dim == 0:
        if g.src is not None or g.tgt is not None:
            report.add("DimensionMismatch", g.name, "object with a boundary")
        return
    if g.src is None or g.tgt is None:
        report.add("DimensionMismatch", g.name, "missing source or target")
        return
    uses = (_leaves(g.src, set()) | _leaves(g.tgt, set())) & broken
    if uses:
        report.add("EndpointMismatch", g.name,
                   f"boundary uses malformed generators {sorted(uses)}")
        return
    bad = False
    for side, t in ((SRC, g.src), (TGT, g.tgt)):
        d = check_term(t, p, report, f"{g.name}.{side}")
        if d is None:
            bad = True
        elif d != g.dim - 1:
            report.add("DimensionMismatch", f"{g.name}.{side}",
                       f"{side} has dimension {d}, expected {g.dim - 1}")
            bad = True
    if bad:
        return
    # globularity: the source and target are parallel
    n = g.dim - 1
    for k in range(n):
        for side in (SRC, TGT):
            x = boundary(g.src, k, side, p)
            y = boundary(g.tgt, k, side, p)
            if not cells_equivalent(x, y, p):
                report.add("EndpointMismatch", g.name,
                           f"{side}_{k} of source {x} differs from {side}_{k} "
                           f"of target {y}")
    if g.dim >= 2:
        c = abelian_class(g.tgt, p)
        for x, v in abelian_class(g.src, p).items():
            c[x] = c.get(x, 0) - v
        if _constant_d(c, p):
            report.add("GlobularityFailure", g.name,
                       "d(cls(tgt) - cls(src)) is nonzero")


# functors


@dataclass
class OmegaFunctorData:
    """A strict functor between free omega-categories, given on generators."""

    source: Polygraph
    target: Polygraph
    images: dict

    @classmethod
    def identity(cls, p: Polygraph) -> "OmegaFunctorData":
        return cls(p, p, {g.name: Gen(g.name) for g in p})

    def __call__(self, t: CellTerm) -> CellTerm:
        return apply_functor(self, t)

    def then(self, other: "OmegaFunctorData") -> "OmegaFunctorData":
        """``other ∘ self``."""
        return OmegaFunctorData(self.source, other.target,
                                {k: apply_functor(other, v) for k, v in self.images.items()})


def apply_functor(f: OmegaFunctorData, t: CellTerm) -> CellTerm:
    if isinstance(t, Gen):
        try:
            return f.images[t.name]
        except KeyError:
            raise UnknownGenerator(f"functor has no image for {t.name!r}") from None
    if isinstance(t, Id):
        return Id(apply_functor(f, t.inner))
    return Comp(t.i, apply_functor(f, t.left), apply_functor(f, t.right))


def check_functor(f: OmegaFunctorData) -> ValidationReport:
    """Boundary preservation of ``f`` on every generator."""
    report = ValidationReport()
    for g in f.source:
        if g.name not in f.images:
            report.add("UnknownGenerator", g.name, "no image")
            continue
        img = f.images[g.name]
        d = check_term(img, f.target, report, g.name)
        if d is None:
            continue
        if d != g.dim:
            report.add("DimensionMismatch", g.name,
                       f"image has dimension {d}, expected {g.dim}")
            continue
        if g.dim == 0:
            continue
        for side, t in ((SRC, g.src), (TGT, g.tgt)):
            try:
                ok = cells_equivalent(apply_functor(f, t),
                                      boundary(img, g.dim - 1, side, f.target), f.target)
            except CellTermError as e:
                report.add(e.kind, g.name, str(e))
                continue
            if not ok:
                report.add("EndpointMismatch", g.name, f"image does not preserve {side}")
    return report


# JSON


def term_to_json(t: CellTerm):
    if isinstance(t, Gen):
        return {"gen": t.name}
    if isinstance(t, Id):
        return {"id": term_to_json(t.inner)}
    return {"comp": [t.i, term_to_json(t.left), term_to_json(t.right)]}


def term_from_json(obj) -> CellTerm:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise TermParseError(f"bad term {obj!r}")
    (key, val), = obj.items()
    if key == "gen":
        if not isinstance(val, str):
            raise TermParseError(f"bad generator name {val!r}")
        return Gen(val)
    if key == "id":
        return Id(term_from_json(val))
    if key == "comp":
        if (not isinstance(val, list) or len(val) != 3 or not isinstance(val[0], int)
                or isinstance(val[0], bool)):
            raise TermParseError(f"bad composite {val!r}")
        return Comp(val[0], term_from_json(val[1]), term_from_json(val[2]))
    raise TermParseError(f"unknown term constructor {key!r}")


def _pad_loaded(t: CellTerm, p: Polygraph) -> CellTerm:
    # whiskers may be written without units; pad each composite
    if isinstance(t, Gen):
        return t
    if isinstance(t, Id):
        return Id(_pad_loaded(t.inner, p))
    a, b = _pad_loaded(t.left, p), _pad_loaded(t.right, p)
    try:
        return comp(t.i, a, b, p)
    except CellTermError:
        return Comp(t.i, a, b)


def polygraph_to_json(p: Polygraph) -> dict:
    gens = []
    for g in p:
        d = {"name": g.name, "dim": g.dim}
        if g.dim > 0:
            d["src"] = term_to_json(g.src)
            d["tgt"] = term_to_json(g.tgt)
        gens.append(d)
    return {"generators": gens}


def polygraph_from_json(obj) -> Polygraph:
    if not isinstance(obj, dict) or not isinstance(obj.get("generators"), list):
        raise TermParseError("polygraph must be an object with a 'generators' list")
    p = Polygraph()
    raw = []
    for g in obj["generators"]:
        if (not isinstance(g, dict) or not isinstance(g.get("name"), str)
                or not isinstance(g.get("dim"), int)):
            raise TermParseError(f"bad generator entry {g!r}")
        s = term_from_json(g["src"]) if "src" in g else None
        t = term_from_json(g["tgt"]) if "tgt" in g else None
        raw.append(Generator(g["name"], g["dim"], s, t))
    p = Polygraph(raw)
    # padding needs every dimension known, so it runs after the table exists
    padded = []
    for g in p.generators.values():
        if g.src is not None and g.tgt is not None:
            try:
                g = Generator(g.name, g.dim, pad(_pad_loaded(g.src, p), g.dim - 1, p),
                              pad(_pad_loaded(g.tgt, p), g.dim - 1, p))
            except CellTermError:
                pass
        padded.append(g)
    out = Polygraph(padded)
    out.duplicates = p.duplicates
    return out


def dumps(obj) -> str:
    """Canonical JSON text used for every file this package writes."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load_polygraph(path) -> Polygraph:
    with open(path, encoding="utf-8") as fh:
        return polygraph_from_json(json.load(fh))


def save_polygraph(p: Polygraph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(polygraph_to_json(p)))


def functor_to_json(f: OmegaFunctorData) -> dict:
    return {"images": {k: term_to_json(v) for k, v in f.images.items()}}


def functor_from_json(obj, source: Polygraph, target: Polygraph) -> OmegaFunctorData:
    if not isinstance(obj, dict) or not isinstance(obj.get("images"), dict):
        raise TermParseError("functor must be an object with an 'images' table")
    return OmegaFunctorData(source, target,
                            {k: term_from_json(v) for k, v in obj["images"].items()})
