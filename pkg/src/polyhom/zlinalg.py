"""Exact integer linear algebra.

Matrices are immutable and hold Python ints, so nothing ever overflows.
Everything downstream (coefficient groups, chain complexes, homology) is
built on the Smith normal form computed here.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence


class ShapeMismatch(ValueError):
    pass


class DDNotZero(ValueError):
    """Raised when a differential does not square to zero."""


class EntryTooLarge(ArithmeticError):
    pass


def _entry_bit_cap():
    raw = os.environ.get("POLYHOM_MAX_ENTRY_BITS")
    if not raw:
        return None
    return int(raw)


def check_entry_bits(m: "IntMatrix"):
    """Raise EntryTooLarge if an entry exceeds POLYHOM_MAX_ENTRY_BITS."""
    cap = _entry_bit_cap()
    if cap is None:
        return
    for x in m.entries:
        if abs(x).bit_length() > cap:
            raise EntryTooLarge(
                f"matrix entry of {abs(x).bit_length()} bits exceeds "
                f"POLYHOM_MAX_ENTRY_BITS={cap}")


class IntMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[int]):
        entries = tuple(int(x) for x in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ShapeMismatch(
                f"{len(entries)} entries for a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ShapeMismatch("column count needed for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ShapeMismatch("ragged rows")
        return cls(len(rows), cols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int):
        columns = [tuple(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ShapeMismatch("column of wrong length")
        return cls(rows, len(columns),
                   [columns[j][i] for i in range(rows) for j in range(len(columns))])

    @classmethod
    def zeros(cls, rows: int, cols: int):
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int):
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def scalar(cls, n: int, k: int):
        return cls(n, n, [k if i == j else 0 for i in range(n) for j in range(n)])

    @staticmethod
    def block_diag(blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return IntMatrix(rows, cols, [x for r in out for x in r])

    @staticmethod
    def hstack(blocks: Sequence["IntMatrix"], rows: int | None = None) -> "IntMatrix":
        if not blocks:
            return IntMatrix.zeros(rows or 0, 0)
        n = blocks[0].rows
        if any(b.rows != n for b in blocks):
            raise ShapeMismatch("hstack of matrices with different row counts")
        cols = sum(b.cols for b in blocks)
        data = []
        for i in range(n):
            for b in blocks:
                data.extend(b.entries[i * b.cols:(i + 1) * b.cols])
        return IntMatrix(n, cols, data)

    @staticmethod
    def vstack(blocks: Sequence["IntMatrix"], cols: int | None = None) -> "IntMatrix":
        if not blocks:
            return IntMatrix.zeros(0, cols or 0)
        n = blocks[0].cols
        if any(b.cols != n for b in blocks):
            raise ShapeMismatch("vstack of matrices with different column counts")
        return IntMatrix(sum(b.rows for b in blocks), n,
                         [x for b in blocks for x in b.entries])

    # access

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, r0, r1, c0, c1) -> "IntMatrix":
        return IntMatrix(r1 - r0, c1 - c0,
                         [self[i, j] for i in range(r0, r1) for j in range(c0, c1)])

    def select_columns(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.rows, len(idx),
                         [self[i, j] for i in range(self.rows) for j in idx])

    # arithmetic

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [0] * (n * m)
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            for t, x in enumerate(arow):
                if x:
                    brow = b[t * m:(t + 1) * m]
                    base = i * m
                    for j, y in enumerate(brow):
                        if y:
                            out[base + j] += x * y
        return IntMatrix(n, m, out)

    def apply(self, v: Sequence[int]) -> tuple:
        if len(v) != self.cols:
            raise ShapeMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        c = self.cols
        return tuple(sum(self.entries[i * c + j] * v[j] for j in range(c) if v[j])
                     for i in range(self.rows))

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return IntMatrix(self.rows, self.cols,
                         [x + y for x, y in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same(other)
        return IntMatrix(self.rows, self.cols,
                         [x - y for x, y in zip(self.entries, other.entries)])

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, [-x for x in self.entries])

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [k * x for x in self.entries])

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ShapeMismatch("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})" if self.rows else \
            f"IntMatrix.zeros(0, {self.cols})"


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix.from_rows(m)


# Smith normal form


def _snf(m: IntMatrix):
    """Return (diag, u, u_inv, v) with u @ m @ v diagonal.

    Pivots on the entry of least absolute value, which keeps intermediate
    entries small on the matrices this package produces.
    """
    check_entry_bits(m)
    r, c = m.rows, m.cols
    a = m.to_rows()
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    ui = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    # u tracks row ops (u @ m), ui its inverse, v tracks column ops (m @ v)
    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for row in ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        ad, asr = a[dst], a[src]
        for k in range(c):
            ad[k] += q * asr[k]
        ud, us = u[dst], u[src]
        for k in range(r):
            ud[k] += q * us[k]
        for row in ui:
            row[src] -= q * row[dst]

    def add_col(dst, src, q):
        if q == 0:
            return
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for row in ui:
            row[i] = -row[i]

    diag = []
    for t in range(min(r, c)):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -_round_div(a[i][t], p))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -_round_div(a[t][j], p))
            # a smaller remainder becomes the new pivot
            cand = None
            for i in range(t + 1, r):
                if a[i][t] and (cand is None or abs(a[i][t]) < cand[0]):
                    cand = (abs(a[i][t]), "r", i)
            for j in range(t + 1, c):
                if a[t][j] and (cand is None or abs(a[t][j]) < cand[0]):
                    cand = (abs(a[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            # row and column cleared; enforce divisibility on the rest
            p = a[t][t]
            for i in range(t + 1, r):
                if any(a[i][j] % p for j in range(t + 1, c)):
                    add_row(t, i, 1)
                    moved = True
                    break
            if not moved:
                break
        if a[t][t] < 0:
            negate_row(t)
        diag.append(a[t][t])

    out = (diag,
           IntMatrix(r, r, [x for row in u for x in row]),
           IntMatrix(r, r, [x for row in ui for x in row]),
           IntMatrix(c, c, [x for row in v for x in row]))
    for mat in out[1:]:
        check_entry_bits(mat)
    check_entry_bits(IntMatrix(1, len(diag), diag))
    return out


def _round_div(x: int, p: int) -> int:
    """Quotient q minimising |x - q p|."""
    q, rem = divmod(x, p)
    if 2 * abs(rem) > abs(p):
        q += 1
    return q


def smith_normal_form(m) -> tuple:
    """Smith normal form of an integer matrix.

    Returns ``(s, u, v)`` with ``u @ m @ v == s``, ``u`` and ``v`` unimodular,
    and ``s`` diagonal with nonnegative entries each dividing the next.
    """
    m = _as_matrix(m)
    diag, u, _, v = _snf(m)
    s = [[0] * m.cols for _ in range(m.rows)]
    for i, d in enumerate(diag):
        s[i][i] = d
    s = IntMatrix(m.rows, m.cols, [x for row in s for x in row])
    return s, u, v


def invariant_factors(m) -> list:
    """Nonzero diagonal of the Smith normal form."""
    return _snf(_as_matrix(m))[0]


def rank(m) -> int:
    return len(invariant_factors(m))


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel of ``m``."""
    diag, _, _, v = _snf(m)
    return v.select_columns(range(len(diag), m.cols))


def image_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the lattice spanned by the columns of ``m``."""
    diag, _, ui, _ = _snf(m)
    # m = ui @ s @ v^-1, so colspan(m) is spanned by d_j * ui[:, j]
    cols = [tuple(d * x for x in ui.col(j)) for j, d in enumerate(diag)]
    return IntMatrix.from_columns(cols, m.rows)


def solve(m: IntMatrix, b: Sequence[int]):
    """An integer solution of ``m @ x == b``, or None if there is none."""
    if len(b) != m.rows:
        raise ShapeMismatch("right-hand side of wrong length")
    diag, u, _, v = _snf(m)
    ub = u.apply(b)
    z = []
    for j, d in enumerate(diag):
        if ub[j] % d:
            return None
        z.append(ub[j] // d)
    if any(ub[len(diag):]):
        return None
    z.extend([0] * (m.cols - len(diag)))
    return v.apply(z)


def in_span(m: IntMatrix, b: Sequence[int]) -> bool:
    if not any(b):
        return True
    if m.cols == 0:
        return False
    return solve(m, b) is not None


# groups


@dataclass(frozen=True)
class FgAbGroup:
    """Z^rank ⊕ Z/d_1 ⊕ ... with d_1 | d_2 | ... and every d_i >= 2."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", t)
        if self.rank < 0:
            raise ValueError("negative rank")
        for d in t:
            if d < 2:
                raise ValueError(f"torsion coefficient {d} < 2")
        for d0, d1 in zip(t, t[1:]):
            if d1 % d0:
                raise ValueError(f"torsion coefficients {t} not a divisor chain")

    @classmethod
    def from_divisors(cls, free_rank: int, divisors: Iterable[int]):
        """Canonical group from a free rank and cyclic orders (any order, any size)."""
        ds = [abs(d) for d in divisors if abs(d) > 1]
        # (a, b) -> (gcd, lcm) on every pair yields the divisor chain
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                g = math.gcd(ds[i], ds[j])
                ds[i], ds[j] = g, ds[i] * ds[j] // g
        return cls(free_rank, tuple(d for d in ds if d > 1))

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"

    def compact(self) -> str:
        return str(self).replace(" ", "")

    def to_json(self):
        return {"rank": self.rank, "torsion": list(self.torsion), "text": str(self)}

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        text = text.replace(" ", "")
        if text in ("0", ""):
            return cls()
        rank, torsion = 0, []
        for part in text.split("⊕"):
            if part == "Z":
                rank += 1
            elif part.startswith("Z^"):
                rank += int(part[2:])
            elif part.startswith("Z/"):
                torsion.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse group {text!r}")
        return cls.from_divisors(rank, torsion)


def quotient_group(gens: IntMatrix) -> FgAbGroup:
    """Z^rows modulo the span of the columns of ``gens``."""
    diag = invariant_factors(gens) if gens.cols else []
    return FgAbGroup.from_divisors(gens.rows - len(diag), diag)


@dataclass(frozen=True)
class PresentedGroup:
    """The cokernel of ``relations``: Z^generators / (column span)."""

    generators: int
    relations: IntMatrix = None

    def __post_init__(self):
        rel = self.relations
        if rel is None:
            rel = IntMatrix.zeros(self.generators, 0)
        elif not isinstance(rel, IntMatrix):
            rel = IntMatrix.from_rows(rel, cols=None if rel else 0)
            if rel.rows == 0 and self.generators:
                rel = IntMatrix.zeros(self.generators, 0)
        object.__setattr__(self, "relations", rel)
        if rel.rows != self.generators:
            raise ShapeMismatch(
                f"relations have {rel.rows} rows for {self.generators} generators")

    @classmethod
    def free(cls, r: int):
        return cls(r)

    @classmethod
    def cyclic(cls, d: int):
        return cls(1, IntMatrix(1, 1, [d]))

    def is_free(self) -> bool:
        return self.relations.cols == 0 or self.relations.is_zero()

    def canonical(self) -> FgAbGroup:
        return quotient_group(self.relations)

    def is_zero_element(self, v: Sequence[int]) -> bool:
        return in_span(self.relations, v)

    def equal_elements(self, v, w) -> bool:
        return self.is_zero_element([a - b for a, b in zip(v, w)])

    @staticmethod
    def direct_sum(groups: Sequence["PresentedGroup"]) -> "PresentedGroup":
        return PresentedGroup(sum(g.generators for g in groups),
                              IntMatrix.block_diag([g.relations for g in groups]))


def maps_relations(f: IntMatrix, src: PresentedGroup, tgt: PresentedGroup) -> bool:
    """Whether ``f`` carries the relations of ``src`` into those of ``tgt``."""
    return all(tgt.is_zero_element(c) for c in (f @ src.relations).columns())


def equal_maps(f: IntMatrix, g: IntMatrix, tgt: PresentedGroup) -> bool:
    """Whether ``f`` and ``g`` induce the same map into the quotient ``tgt``."""
    if f.shape != g.shape:
        raise ShapeMismatch(f"{f.shape} vs {g.shape}")
    return all(tgt.is_zero_element(c) for c in (f - g).columns())


def _cycles_basis(d: IntMatrix, tgt_rel: IntMatrix, n: int) -> IntMatrix:
    """Basis of {x in Z^n : d x lies in the span of tgt_rel}."""
    if d.rows == 0:
        return IntMatrix.identity(n)
    k = kernel_basis(IntMatrix.hstack([d, tgt_rel]))
    proj = k.submatrix(0, n, 0, k.cols)
    if proj.cols == 0:
        return proj
    return image_basis(proj)


def _subquotient(basis: IntMatrix, gens: IntMatrix) -> tuple:
    """Coordinates of ``gens`` in ``basis`` (whose span must contain them)."""
    coords = []
    for c in gens.columns():
        y = solve(basis, c)
        if y is None:
            raise DDNotZero("boundary not contained in the cycles")
        coords.append(y)
    return IntMatrix.from_columns(coords, basis.cols)


def is_isomorphism(f, src: PresentedGroup, tgt: PresentedGroup) -> bool:
    """Whether ``f`` induces a bijection ``src -> tgt`` of quotient groups."""
    f = _as_matrix(f) if not isinstance(f, IntMatrix) else f
    if f.shape != (tgt.generators, src.generators):
        raise ShapeMismatch(
            f"map of shape {f.shape} between groups with "
            f"{src.generators} and {tgt.generators} generators")
    if not maps_relations(f, src, tgt):
        raise ShapeMismatch("map does not carry relations into relations")
    coker = quotient_group(IntMatrix.hstack([f, tgt.relations]))
    if not coker.is_trivial():
        return False
    z = _cycles_basis(f, tgt.relations, src.generators)
    if z.cols == 0:
        return True
    return quotient_group(_subquotient(z, src.relations)).is_trivial()


# chain complexes


class ChainComplex:
    """Graded presented groups with differentials ``d_n: C_n -> C_{n-1}``.

    ``differentials[n - 1]`` is ``d_n`` for ``n = 1..top``.
    """

    def __init__(self, groups: Sequence[PresentedGroup],
                 differentials: Sequence[IntMatrix], labels=None):
        self.groups = tuple(groups)
        self.differentials = tuple(differentials)
        self.labels = labels
        if len(self.differentials) != max(len(self.groups) - 1, 0):
            raise ShapeMismatch(
                f"{len(self.differentials)} differentials for "
                f"{len(self.groups)} degrees")
        for n, d in enumerate(self.differentials, start=1):
            want = (self.groups[n - 1].generators, self.groups[n].generators)
            if d.shape != want:
                raise ShapeMismatch(f"d_{n} has shape {d.shape}, expected {want}")

    @property
    def top(self) -> int:
        return len(self.groups) - 1

    def rank(self, n: int) -> int:
        if 0 <= n <= self.top:
            return self.groups[n].generators
        return 0

    def group(self, n: int) -> PresentedGroup:
        if 0 <= n <= self.top:
            return self.groups[n]
        return PresentedGroup(0)

    def d(self, n: int) -> IntMatrix:
        if 1 <= n <= self.top:
            return self.differentials[n - 1]
        return IntMatrix.zeros(self.rank(n - 1), self.rank(n))

    def is_free(self) -> bool:
        return all(g.is_free() for g in self.groups)

    def check(self):
        """Raise unless d respects relations and d∘d vanishes modulo relations."""
        for n in range(1, self.top + 1):
            if not maps_relations(self.d(n), self.group(n), self.group(n - 1)):
                raise DDNotZero(f"d_{n} does not respect relations")
        for n in range(2, self.top + 1):
            dd = self.d(n - 1) @ self.d(n)
            tgt = self.group(n - 2)
            for j, c in enumerate(dd.columns()):
                if not tgt.is_zero_element(c):
                    raise DDNotZero(f"d_{n - 1} d_{n} nonzero on basis element {j}")
        return self

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.groups == other.groups
                and self.differentials == other.differentials)

    def __repr__(self):
        ranks = [g.generators for g in self.groups]
        return f"ChainComplex(ranks={ranks})"


def homology_with_cycles(c: ChainComplex, n: int):
    """Cycle basis and boundary coordinates for degree ``n``.

    Returns ``(z, b)``: the columns of ``z`` are a basis of the cycles in
    the free cover of ``C_n`` and ``b`` expresses the boundaries (plus the
    relations of ``C_n``) in that basis, so ``H_n = coker(b)``.
    """
    r = c.rank(n)
    z = _cycles_basis(c.d(n), c.group(n - 1).relations, r)
    bound = IntMatrix.hstack([c.d(n + 1), c.group(n).relations], rows=r)
    if z.cols == 0:
        return z, IntMatrix.zeros(0, bound.cols)
    return z, _subquotient(z, bound)


def homology_of_complex(c: ChainComplex, degrees: int | None = None) -> list:
    """Homology groups ``H_0 .. H_top`` (or ``H_0 .. H_{degrees-1}``)."""
    top = c.top if degrees is None else degrees - 1
    out = []
    for n in range(top + 1):
        if n > c.top:
            out.append(FgAbGroup())
            continue
        z, b = homology_with_cycles(c, n)
        out.append(quotient_group(b) if z.cols else FgAbGroup())
    return out


class ChainMap:
    """Degree-wise matrices ``components[n]: source_n -> target_n``."""

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 components: Sequence[IntMatrix]):
        self.source = source
        self.target = target
        top = max(source.top, target.top) + 1 if (source.groups or target.groups) else 0
        comps = list(components)
        while len(comps) < top:
            n = len(comps)
            comps.append(IntMatrix.zeros(target.rank(n), source.rank(n)))
        self.components = tuple(comps)
        for n, f in enumerate(self.components):
            if f.shape != (target.rank(n), source.rank(n)):
                raise ShapeMismatch(f"component {n} has shape {f.shape}")

    def component(self, n: int) -> IntMatrix:
        if 0 <= n < len(self.components):
            return self.components[n]
        return IntMatrix.zeros(self.target.rank(n), self.source.rank(n))

    def commutation_defect(self):
        """First degree where the map fails to be a chain map, or None."""
        for n in range(len(self.components)):
            if not maps_relations(self.component(n), self.source.group(n),
                                  self.target.group(n)):
                return n
        for n in range(1, len(self.components)):
            lhs = self.target.d(n) @ self.component(n)
            rhs = self.component(n - 1) @ self.source.d(n)
            if not equal_maps(lhs, rhs, self.target.group(n - 1)):
                return n
        return None

    def is_chain_map(self) -> bool:
        return self.commutation_defect() is None

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition ``self ∘ other``."""
        n = max(len(self.components), len(other.components))
        return ChainMap(other.source, self.target,
                        [self.component(k) @ other.component(k) for k in range(n)])

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        n = max(len(self.components), len(other.components))
        return ChainMap(self.source, self.target,
                        [self.component(k) - other.component(k) for k in range(n)])

    def equals(self, other: "ChainMap") -> bool:
        """Equality of induced maps on the quotient groups."""
        n = max(len(self.components), len(other.components))
        return all(equal_maps(self.component(k), other.component(k),
                              self.target.group(k)) for k in range(n))

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, [IntMatrix.identity(g.generators) for g in c.groups])


def induced_on_homology(f: ChainMap, n: int):
    """Matrix of ``H_n(f)`` in Smith-adapted generators.

    Returns ``(src_group, tgt_group, matrix)``. Rows index the cyclic
    summands of the target (torsion first, then free), columns those of
    the source; torsion rows are reduced modulo their order.
    """
    src_gens, src_group = _adapted_generators(f.source, n)
    zt, bt = homology_with_cycles(f.target, n)
    tgt_group = quotient_group(bt) if zt.cols else FgAbGroup()
    if zt.cols == 0:
        return src_group, tgt_group, IntMatrix.zeros(0, len(src_gens))
    diag, u, _, _ = _snf(bt) if bt.cols else ([], IntMatrix.identity(zt.cols), None, None)
    keep = [j for j in range(zt.cols) if j >= len(diag) or diag[j] != 1]
    cols = []
    for g in src_gens:
        image = f.component(n).apply(g)
        y = solve(zt, image)
        if y is None:
            raise DDNotZero("chain map does not send cycles to cycles")
        coords = u.apply(y)
        col = []
        for j in keep:
            x = coords[j]
            if j < len(diag):
                x %= diag[j]
            col.append(x)
        cols.append(col)
    return src_group, tgt_group, IntMatrix.from_columns(cols, len(keep))


def _adapted_generators(c: ChainComplex, n: int):
    z, b = homology_with_cycles(c, n)
    if z.cols == 0:
        return [], FgAbGroup()
    if b.cols:
        diag, _, ui, _ = _snf(b)
    else:
        diag, ui = [], IntMatrix.identity(z.cols)
    basis = z @ ui
    keep = [j for j in range(z.cols) if j >= len(diag) or diag[j] != 1]
    return [basis.col(j) for j in keep], quotient_group(b)
