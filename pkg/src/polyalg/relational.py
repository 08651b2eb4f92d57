"""Relational operations as linear maps over symbolic collection terms.

A relation is a named, typed schema plus a term in the tensor chain of
free modules over the column types, with coefficients in the session ring.
Data stays unnormalised between operations; canonical forms are produced
at output, for equality, and inside products. Negative multiplicities are
ordinary data (deletions), and wildcard baselines from outer joins are
ordinary data too, flagged at rendering time.
"""

from dataclasses import dataclass

from . import normal, product, terms
from .normal import (
    InfiniteSupport,
    enumerate_nf,
    has_baseline,
    nf_equal,
    normalize,
    readback,
    strip_compact,
)
from .prims import (
    BOOL,
    INT,
    INT_WITH_INF,
    INT_WITH_NEG_INF,
    STRING,
    Int64,
    PrimSet,
    Str,
)
from .rings import GF2Ring, Ring
from .spaces import CompactFree, Free, SpaceError, Tensor, tensor_chain
from .terms import (
    MulGen,
    Term,
    fmap,
    inject,
    linear_combination,
    scale,
    scaled,
    sum_terms,
    tensor,
    weight,
    zero,
)


class RelationError(ValueError):
    pass


TYPE_NAMES = {"int": INT, "str": STRING, "bool": BOOL}


def type_name(prim: PrimSet) -> str:
    for name, p in TYPE_NAMES.items():
        if p == prim:
            return name
    return str(prim)


@dataclass(frozen=True)
class Schema:
    columns: tuple  # of (name, PrimSet)

    def __post_init__(self):
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            raise RelationError(f"duplicate column names in {names}")
        if not names:
            raise RelationError("a schema needs at least one column")

    @property
    def names(self):
        return [n for n, _ in self.columns]

    @property
    def prims(self):
        return [p for _, p in self.columns]

    def position(self, name: str) -> int:
        for i, (n, _) in enumerate(self.columns):
            if n == name:
                return i
        raise RelationError(f"unknown attribute {name!r}")

    def prim_of(self, name: str) -> PrimSet:
        return self.columns[self.position(name)][1]

    def __len__(self):
        return len(self.columns)

    def render(self) -> str:
        return ",".join(f"{n}:{type_name(p)}" for n, p in self.columns)


def schema(*cols) -> Schema:
    return Schema(tuple(cols))


class Relation:
    """Schema, ring and an unnormalised data term; the canonical form is
    computed on demand and cached."""

    def __init__(self, sch: Schema, ring: Ring, term: Term, nf=None):
        self.schema = sch
        self.ring = ring
        self.term = term
        self._nf = nf

    def nf(self):
        if self._nf is None:
            self._nf = normalize(_to_chain(self.term))
        return self._nf

    def chain_term(self) -> Term:
        return _to_chain(self.term)

    def weight(self):
        return weight(self.term)

    def has_baseline(self) -> bool:
        return has_baseline(self.nf())

    def rows(self, allow_baseline: bool = True):
        """Sorted (tuple, coefficient) rows; wildcard slots appear as STAR."""
        return enumerate_nf(self.nf(), allow_baseline=allow_baseline)

    def lookup(self, row):
        """Coefficient at a full tuple; STAR components read baselines."""
        return normal.nf_lookup_path(self.nf(), tuple(row))

    def equals(self, other: "Relation") -> bool:
        if self.schema != other.schema or self.ring is not other.ring:
            return False
        a, b = self.nf(), other.nf()
        if a.space != b.space:
            # one side compact, the other plain; widen the plain one
            a, b = _align_nfs(a, b)
        return nf_equal(a, b)

    def __repr__(self):
        return f"Relation({self.schema.render()}, {self.ring}, {len(self.rows())} rows)"


def _align_nfs(a, b):
    wa, wb = has_baseline(a), has_baseline(b)
    if isinstance(a.space, (CompactFree, Tensor)) and not wa and a.space != b.space:
        try:
            a = strip_compact(a)
        except InfiniteSupport:
            pass
    if a.space != b.space and not wb:
        try:
            b = strip_compact(b)
        except InfiniteSupport:
            pass
    return a, b


def relation_from_rows(sch: Schema, ring: Ring, rows) -> Relation:
    """Rows are (tuple, coefficient) pairs; duplicates accumulate."""
    space = tensor_chain(ring, sch.prims)
    parts = []
    for row, coeff in rows:
        if len(row) != len(sch):
            raise RelationError(f"row {row!r} does not fit schema {sch.render()}")
        parts.append(scale(ring.coerce(coeff), _row_gen(row, space)))
    return Relation(sch, ring, sum_terms(space, parts))


def _row_gen(row, space):
    if isinstance(space, Tensor):
        return tensor(inject(row[0], space.lhs), _row_gen(row[1:], space.rhs))
    return inject(row[0], space)


# chain plumbing ---------------------------------------------------------------

def _expand_mul(t_space, g):
    return readback(product.nf_product([normalize(f) for f in g.factors]))


def _is_chain(space) -> bool:
    while isinstance(space, Tensor):
        if not isinstance(space.lhs, (Free, CompactFree)):
            return False
        space = space.rhs
    return isinstance(space, (Free, CompactFree))


def _to_chain(t: Term) -> Term:
    """Reassociate an arbitrarily nested tensor of free factors into the
    right-nested chain. Linear in the term; no normalisation."""
    space = t.space
    if isinstance(space, (Free, CompactFree)) or _is_chain(space):
        return t
    if not isinstance(space, Tensor):
        raise SpaceError(f"not a relation space: {space}")
    parts = []
    out = None
    for c, g in linear_combination(t):
        if isinstance(g, MulGen):
            img = _to_chain(_expand_mul(space, g))
        else:
            img = _chain_append(_to_chain(g.lhs), _to_chain(g.rhs))
        out = img.space
        parts.append(scaled(c, img))
    if out is None:
        prims = _flat_prims(space)
        compact = _is_compact_chain(space)
        out = tensor_chain(space.ring, prims, compact=compact)
    return sum_terms(out, parts)


def _chain_append(u: Term, w: Term) -> Term:
    """Chain concatenation: distribute the tail into the right spine."""
    space = u.space
    if isinstance(space, (Free, CompactFree)):
        return tensor(u, w)
    parts = []
    out = None
    for c, g in linear_combination(u):
        if isinstance(g, MulGen):
            img = _chain_append(_expand_mul(space, g), w)
        else:
            img = tensor(g.lhs, _chain_append(g.rhs, w))
        out = img.space
        parts.append(scaled(c, img))
    if out is None:
        out = Tensor(space.lhs, _chain_space_append(space.rhs, w.space))
    return sum_terms(out, parts)


def _chain_space_append(s, w):
    if isinstance(s, (Free, CompactFree)):
        return Tensor(s, w)
    return Tensor(s.lhs, _chain_space_append(s.rhs, w))


def _flat_prims(space):
    if isinstance(space, (Free, CompactFree)):
        return [space.prim]
    return _flat_prims(space.lhs) + _flat_prims(space.rhs)


def _is_compact_chain(space):
    if isinstance(space, (Free, CompactFree)):
        return isinstance(space, CompactFree)
    return _is_compact_chain(space.lhs) or _is_compact_chain(space.rhs)


def _map_position(t: Term, pos: int, leaf_fn) -> Term:
    """Rewrite the factor at a chain position with a linear map on terms."""
    space = t.space
    if not isinstance(space, Tensor):
        if pos != 0:
            raise RelationError("position out of range")
        return leaf_fn(t)
    parts = []
    out = None
    for c, g in linear_combination(t):
        if isinstance(g, MulGen):
            img = _map_position(_expand_mul(space, g), pos, leaf_fn)
        elif pos == 0:
            img = tensor(leaf_fn(g.lhs), g.rhs)
        else:
            img = tensor(g.lhs, _map_position(g.rhs, pos - 1, leaf_fn))
        out = img.space
        parts.append(scaled(c, img))
    if out is None:
        probe = leaf_fn(zero(_space_at(space, pos)))
        out = _replace_space(space, pos, probe.space)
    return sum_terms(out, parts)


def _space_at(space, pos):
    while pos > 0:
        space = space.rhs
        pos -= 1
    return space.lhs if isinstance(space, Tensor) else space


def _replace_space(space, pos, new):
    if not isinstance(space, Tensor):
        return new
    if pos == 0:
        return Tensor(new, space.rhs)
    return Tensor(space.lhs, _replace_space(space.rhs, pos - 1, new))


def _swap_adjacent(t: Term, d: int) -> Term:
    """Exchange chain positions d and d+1; the commutator padded by the
    associator, applied without expanding unrelated structure."""
    space = t.space
    if not isinstance(space, Tensor):
        raise RelationError("swap position out of range")
    parts = []
    out = None
    for c, g in linear_combination(t):
        if isinstance(g, MulGen):
            img = _swap_adjacent(_expand_mul(space, g), d)
        elif d > 0:
            img = tensor(g.lhs, _swap_adjacent(g.rhs, d - 1))
        elif not isinstance(space.rhs, Tensor):
            img = tensor(g.rhs, g.lhs)
        else:
            inner_parts = []
            for c2, g2 in linear_combination(g.rhs):
                if isinstance(g2, MulGen):
                    for c3, g3 in linear_combination(_expand_mul(space.rhs, g2)):
                        inner_parts.append(
                            scale(c3, tensor(g3.lhs, tensor(g.lhs, g3.rhs)))
                        )
                    continue
                inner_parts.append(scaled(c2, tensor(g2.lhs, tensor(g.lhs, g2.rhs))))
            if not inner_parts:
                continue
            inner_space = inner_parts[0].space
            img = sum_terms(inner_space, inner_parts)
        out = img.space
        parts.append(scaled(c, img))
    if out is None:
        out = _swapped_space(space, d)
    return sum_terms(out, parts)


def _swapped_space(space, d):
    if d > 0:
        return Tensor(space.lhs, _swapped_space(space.rhs, d - 1))
    if not isinstance(space.rhs, Tensor):
        return Tensor(space.rhs, space.lhs)
    return Tensor(space.rhs.lhs, Tensor(space.lhs, space.rhs.rhs))


def _apply_permutation(t: Term, perm) -> Term:
    """Reorder chain positions so output position i holds input position
    perm[i], as a product of adjacent transpositions."""
    current = list(range(len(perm)))
    for i, want in enumerate(perm):
        j = current.index(want)
        while j > i:
            t = _swap_adjacent(t, j - 1)
            current[j - 1], current[j] = current[j], current[j - 1]
            j -= 1
    return t


# core operations ----------------------------------------------------------------

def _require_same_schema(r: Relation, s: Relation, what: str):
    if r.schema != s.schema:
        raise RelationError(
            f"{what} needs matching schemas, got {r.schema.render()} and {s.schema.render()}"
        )
    if r.ring is not s.ring:
        raise RelationError(f"{what} needs matching rings")


def _aligned_terms(r: Relation, s: Relation):
    a, b = r.chain_term(), s.chain_term()
    if a.space != b.space:
        # widen the plain side when exactly one carries wildcards
        if _is_compact_chain(a.space) and not _is_compact_chain(b.space):
            b = product._widen(b)
        elif _is_compact_chain(b.space) and not _is_compact_chain(a.space):
            a = product._widen(a)
    return a, b


def union(r: Relation, s: Relation) -> Relation:
    _require_same_schema(r, s, "union")
    a, b = _aligned_terms(r, s)
    return Relation(r.schema, r.ring, a + b)


def diff(r: Relation, s: Relation) -> Relation:
    _require_same_schema(r, s, "difference")
    a, b = _aligned_terms(r, s)
    return Relation(r.schema, r.ring, a - b)


def apply_update(db: Relation, delta: Relation) -> Relation:
    """Inserts and deletions are one addition; negative rows persist."""
    _require_same_schema(db, delta, "update")
    a, b = _aligned_terms(db, delta)
    return Relation(db.schema, db.ring, a + b)


def intersect(r: Relation, s: Relation) -> Relation:
    _require_same_schema(r, s, "intersection")
    a, b = _aligned_terms(r, s)
    return Relation(r.schema, r.ring, a * b)


def cartesian(r: Relation, s: Relation) -> Relation:
    overlap = set(r.schema.names) & set(s.schema.names)
    if overlap:
        raise RelationError(f"product inputs share attributes {sorted(overlap)}")
    sch = Schema(r.schema.columns + s.schema.columns)
    # one symbolic node; expansion deferred indefinitely
    return Relation(sch, r.ring, tensor(r.term, s.term))


def select(r: Relation, pred) -> Relation:
    """Keep tuples satisfying the predicate, multiplicities intact.

    Single-column comparisons filter that factor symbolically; predicates
    reading several columns go through the expanded rows. A wildcard in a
    filtered column has no finite selection."""
    col = pred.single_column()
    if col is not None:
        pos = r.schema.position(col)
        prim = r.schema.prims[pos]
        keep = pred.value_test(prim)

        def leaf(u):
            out_space = u.space

            def act(a):
                return inject(a, out_space) if keep(a) else zero(out_space)

            try:
                return terms.fold(u, out_space, act)
            except SpaceError:
                # a wildcard in the filtered column has no finite selection
                raise RelationError(
                    f"cannot select on wildcard-bearing column {col!r}"
                ) from None

        return Relation(r.schema, r.ring, _map_position(r.chain_term(), pos, leaf))
    # general tuple predicate: expand
    row_test = pred.row_test(r.schema)
    try:
        rows = r.rows(allow_baseline=False)
    except InfiniteSupport:
        raise RelationError("cannot select on a relation with wildcard rows") from None
    kept = [(row, c) for row, c in rows if row_test(row)]
    return relation_from_rows(r.schema, r.ring, kept)


def project(r: Relation, names) -> Relation:
    """Keep the named columns; discarded columns contribute their weight,
    so multiplicities are preserved rather than collapsed."""
    if not names:
        raise RelationError("projection needs at least one attribute")
    positions = [r.schema.position(n) for n in names]
    if len(set(positions)) != len(positions):
        raise RelationError(f"repeated attributes in projection {names}")
    keep_sorted = sorted(positions)
    mask = [i in positions for i in range(len(r.schema))]
    t = _project_term(r.chain_term(), mask)
    sch = Schema(tuple(r.schema.columns[i] for i in keep_sorted))
    out = Relation(sch, r.ring, t)
    if keep_sorted != positions:
        perm = [keep_sorted.index(p) for p in positions]
        out = rename(out, perm)
    return out


def _project_term(t: Term, mask) -> Term:
    space = t.space
    if not isinstance(space, Tensor):
        if not mask[0]:
            raise RelationError("cannot project away every attribute")
        return t
    head, rest = mask[0], mask[1:]
    parts = []
    out = None
    for c, g in linear_combination(t):
        if isinstance(g, MulGen):
            img = _project_term(_expand_mul(space, g), mask)
        elif head and any(rest):
            img = tensor(g.lhs, _project_term(g.rhs, rest))
        elif head:
            img = scale(weight(g.rhs), g.lhs)
        else:
            img = scale(weight(g.lhs), _project_term(g.rhs, rest))
        out = img.space
        parts.append(scaled(c, img))
    if out is None:
        prims = _flat_prims(space)
        kept = [p for p, m in zip(prims, mask) if m]
        out = tensor_chain(space.ring, kept, compact=_is_compact_chain(space))
    return sum_terms(out, parts)


def rename(r: Relation, perm) -> Relation:
    """Permute column order; output column i is input column perm[i]."""
    if sorted(perm) != list(range(len(r.schema))):
        raise RelationError(f"{perm} is not a permutation of the columns")
    if list(perm) == list(range(len(r.schema))):
        return Relation(r.schema, r.ring, r.term, r._nf)
    t = _apply_permutation(r.chain_term(), list(perm))
    sch = Schema(tuple(r.schema.columns[p] for p in perm))
    return Relation(sch, r.ring, t)


def relabel(r: Relation, new_names) -> Relation:
    """Rename attributes positionally, keeping data and order."""
    if len(new_names) != len(r.schema):
        raise RelationError("wrong number of attribute names")
    sch = Schema(tuple((n, p) for n, (_, p) in zip(new_names, r.schema.columns)))
    return Relation(sch, r.ring, r.term, r._nf)


def _join_target(rs):
    cols = []
    seen = {}
    for r in rs:
        for n, p in r.schema.columns:
            if n in seen:
                if seen[n] != p:
                    raise RelationError(
                        f"attribute {n!r} has conflicting types "
                        f"{type_name(seen[n])} and {type_name(p)}"
                    )
            else:
                seen[n] = p
                cols.append((n, p))
    return Schema(tuple(cols))


def _embedded_terms(rs, target: Schema):
    out = []
    for r in rs:
        order = [n for n in target.names if n in r.schema.names]
        if order != r.schema.names:
            r = rename(r, [r.schema.position(n) for n in order])
        src = list(r.schema.columns)
        out.append(product.embed(r.chain_term(), src, list(target.columns)))
    return out


def natural_join(rs) -> Relation:
    """Shared attributes are matched by name; inputs are renamed into the
    first-appearance order, widened into the common compact chain, and
    multiplied jointly."""
    rs = list(rs)
    if not rs:
        raise RelationError("join needs at least one input")
    ring = rs[0].ring
    target = _join_target(rs)
    embedded = _embedded_terms(rs, target)
    nf = product.multiply(embedded)
    if not has_baseline(nf):
        nf = strip_compact(nf)
    return Relation(target, ring, readback(nf), nf)


def outer_join(kind: str, r: Relation, s: Relation) -> Relation:
    """Wildcard-padded join: unmatched tuples survive against the unit,
    which matches anything. The result usually carries baselines."""
    if kind not in ("left", "right", "full"):
        raise RelationError(f"unknown outer join kind {kind!r}")
    target = _join_target([r, s])
    x, y = _embedded_terms([r, s], target)
    u = terms.unit_one(x.space)
    if kind == "left":
        prod = x * (y + u)
    elif kind == "right":
        prod = (x + u) * y
    else:
        prod = (x + u) * (y + u)
    nf = normalize(prod)
    if not has_baseline(nf):
        nf = strip_compact(nf)
    return Relation(target, r.ring, readback(nf), nf)


def aggregate(r: Relation, group, target, fold: str) -> Relation:
    """Group by the named columns and fold the target column.

    Sums move the target value into the ring; minimum and maximum collect
    each group's value set and fold it non-linearly, with an adjoined
    infinity so the empty fold is still defined; count is projection's
    multiplicity bookkeeping under another name."""
    if fold not in ("sum", "min", "max", "count"):
        raise RelationError(f"unknown aggregate {fold!r}")
    if not group:
        raise RelationError("aggregation needs at least one grouping attribute")
    if target in group:
        raise RelationError(f"target {target!r} cannot also be a grouping attribute")
    gpos = [r.schema.position(n) for n in group]
    tpos = r.schema.position(target)
    if fold == "count":
        return project(r, list(group))
    if not isinstance(r.schema.prims[tpos], Int64):
        raise RelationError(f"{fold} needs an int target column, not "
                            f"{type_name(r.schema.prims[tpos])}")
    if fold == "sum" and isinstance(r.ring, GF2Ring):
        raise RelationError("sum aggregation is meaningless over gf2; use count")
    try:
        rows = r.rows(allow_baseline=False)
    except InfiniteSupport:
        raise RelationError("cannot aggregate a relation with wildcard rows") from None

    ring = r.ring
    gcols = tuple(r.schema.columns[i] for i in gpos)
    if fold == "sum":
        acc = {}
        order = []
        for row, c in rows:
            key = tuple(row[i] for i in gpos)
            v = ring.mul(c, ring.coerce(row[tpos]))
            if key in acc:
                acc[key] = ring.add(acc[key], v)
            else:
                acc[key] = v
                order.append(key)
        sch = Schema(gcols)
        return relation_from_rows(sch, ring, [(k, acc[k]) for k in order])
    # min / max: per-group value sets, then a non-linear fold of each set
    groups = {}
    order = []
    for row, c in rows:
        key = tuple(row[i] for i in gpos)
        if key not in groups:
            groups[key] = set()
            order.append(key)
        groups[key].add(row[tpos])
    out_prim = INT_WITH_INF if fold == "min" else INT_WITH_NEG_INF
    pick = min if fold == "min" else max
    sch = Schema(gcols + ((target, out_prim),))
    out_rows = []
    for key in order:
        vals = groups[key]
        chosen = pick(vals) if vals else out_prim.marker
        out_rows.append((key + (chosen,), ring.one))
    return relation_from_rows(sch, ring, out_rows)


def map_col(r: Relation, name: str, fn, out_prim: PrimSet | None = None) -> Relation:
    """Apply a total function to one column; colliding outputs add their
    multiplicities. `fn` may be a registered function name or a callable
    (callables need `out_prim` when the column type changes)."""
    pos = r.schema.position(name)
    prim = r.schema.prims[pos]
    if isinstance(fn, str):
        entry = FUNCTIONS.get(fn)
        if entry is None:
            raise RelationError(f"unknown function {fn!r}")
        dom, cod, f = entry
        if dom != prim:
            raise RelationError(
                f"function {fn!r} expects a {type_name(dom)} column, "
                f"{name!r} is {type_name(prim)}"
            )
    else:
        f = fn
        cod = out_prim or prim

    def leaf(u):
        return fmap(u, f, target_index=cod)

    t = _map_position(r.chain_term(), pos, leaf)
    cols = list(r.schema.columns)
    cols[pos] = (name, cod)
    return Relation(Schema(tuple(cols)), r.ring, t)


def clamp_nonneg(r: Relation) -> Relation:
    """Drop rows with negative multiplicity; the explicit non-linear
    barrier between update batches."""
    if r.ring.name != "z":
        raise RelationError("clamp is defined for integer multiplicities")
    try:
        rows = r.rows(allow_baseline=False)
    except InfiniteSupport:
        raise RelationError("cannot clamp a relation with wildcard rows") from None
    return relation_from_rows(r.schema, r.ring, [(row, c) for row, c in rows if c > 0])


# predicate and function registries ---------------------------------------------

_COMPARES = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "prefix": lambda a, b: isinstance(a, str) and a.startswith(b),
    "contains": lambda a, b: isinstance(a, str) and b in a,
}


@dataclass(frozen=True)
class Compare:
    """Column against literal, or column against column."""

    op: str
    column: str
    literal: object = None
    other_column: str | None = None

    def single_column(self):
        return self.column if self.other_column is None else None

    def value_test(self, prim):
        fn = _COMPARES[self.op]
        lit = self.literal
        if self.op in ("prefix", "contains"):
            if not isinstance(prim, Str) or not isinstance(lit, str):
                raise RelationError(f"{self.op} applies to string columns only")
        elif not prim.contains(lit):
            raise RelationError(
                f"literal {lit!r} does not match the type of column {self.column!r}"
            )
        return lambda a: fn(a, lit)

    def row_test(self, sch: Schema):
        fn = _COMPARES[self.op]
        i = sch.position(self.column)
        if self.other_column is None:
            lit = self.literal
            return lambda row: fn(row[i], lit)
        j = sch.position(self.other_column)
        return lambda row: fn(row[i], row[j])


@dataclass(frozen=True)
class ColumnWhere:
    """Arbitrary decidable test on one column; library-level extension
    point, deliberately not reachable from the query syntax."""

    column: str
    test: object  # value -> bool

    def single_column(self):
        return self.column

    def value_test(self, prim):
        return self.test

    def row_test(self, sch: Schema):
        i = sch.position(self.column)
        return lambda row: self.test(row[i])


@dataclass(frozen=True)
class BoolPred:
    kind: str  # and | or | not
    parts: tuple

    def single_column(self):
        return None

    def row_test(self, sch: Schema):
        tests = [p.row_test(sch) for p in self.parts]
        if self.kind == "and":
            return lambda row: all(t(row) for t in tests)
        if self.kind == "or":
            return lambda row: any(t(row) for t in tests)
        return lambda row: not tests[0](row)


FUNCTIONS = {
    "upper": (STRING, STRING, str.upper),
    "lower": (STRING, STRING, str.lower),
    "reverse": (STRING, STRING, lambda s: s[::-1]),
    "length": (STRING, INT, len),
    "abs": (INT, INT, abs),
    "neg": (INT, INT, lambda v: -v),
    "inc": (INT, INT, lambda v: v + 1),
    "dec": (INT, INT, lambda v: v - 1),
}
