"""Products of collections: intersections and joins.

The evaluator works level by level on nested keyed forms. At each level
the factors split into those that restrict the support, having no wildcard
baseline, and those that do not. If a restricting factor exists, only the
one with the fewest components is enumerated and the rest are probed by
lookup; otherwise every factor carries a baseline, the baseline product is
hoisted once, and deviations are produced at the union of the factors'
explicit keys, since an explicit key in any factor can deviate from the
baseline product. Partial products that come out zero prune the whole key
before any deeper work is charged.

All n factors are scheduled jointly: the recursion at a key carries one
looked-up value per factor into the next level rather than folding
pairwise, which is what makes the evaluation worst-case optimal on cyclic
joins such as the triangle.

`naive_multiply` is the deliberately blunt alternative, full expansion by
distributivity, kept as the differential-testing oracle.
"""

from . import metrics, tries
from .normal import (
    NF_VOPS,
    FreeNF,
    MapNF,
    NormalForm,
    PairNF,
    ScalarNF,
    TensorNF,
    compact_summands,
    nf_add,
    nf_scale,
    nf_sub,
    normalize,
    readback,
    ring_vops,
    zero_nf,
)
from .spaces import (
    Biproduct,
    CompactFree,
    CompactMap,
    FinMap,
    Free,
    Scalar,
    Space,
    SpaceError,
    Tensor,
)
from .terms import (
    GenTerm,
    InjGen,
    MapsToGen,
    MulGen,
    OneGen,
    PairGen,
    Term,
    TensorGen,
    WildMapsToGen,
    WildOneGen,
    inject,
    linear_combination,
    maps_to,
    pair,
    scaled,
    sum_terms,
    tensor,
    unit_one,
    wild_maps_to,
    wild_one,
    zero,
)


def multiply(factors) -> NormalForm:
    """Simplified product of same-space terms, scheduled jointly."""
    factors = list(factors)
    if not factors:
        raise SpaceError("a product needs at least one factor")
    space = factors[0].space
    for f in factors[1:]:
        if f.space != space:
            raise SpaceError(f"product factors live in {space} and {f.space}")
    return nf_product([normalize(f) for f in factors])


def nf_product(nfs) -> NormalForm:
    nfs = list(nfs)
    space = nfs[0].space
    if len(nfs) == 1:
        return nfs[0]
    for nf in nfs:
        if nf.is_zero():
            return zero_nf(space)
    if isinstance(space, Scalar):
        ring = space.ring
        m = metrics.current
        acc = nfs[0].value
        for nf in nfs[1:]:
            acc = ring.mul(acc, nf.value)
            m.ring_mults += 1
        return ScalarNF(space, acc)
    if isinstance(space, (Free, CompactFree)):
        ring = space.ring
        m = metrics.current

        def ring_prod(vals):
            acc = vals[0]
            for v in vals[1:]:
                acc = ring.mul(acc, v)
                m.ring_mults += 1
            return acc

        trie, base = _level(
            space.prim,
            [(nf.trie, nf.base) for nf in nfs],
            prod=ring_prod,
            add=ring.add,
            sub=ring.sub,
            is_zero=ring.is_zero,
            zero=ring.zero,
            vops=ring_vops(ring),
        )
        return FreeNF(space, trie, base)
    if isinstance(space, (FinMap, CompactMap)):
        zsub = zero_nf(space.value)
        trie, base = _level(
            space.prim,
            [(nf.trie, nf.base if nf.base is not None else zsub) for nf in nfs],
            prod=nf_product,
            add=nf_add,
            sub=nf_sub,
            is_zero=lambda v: v.is_zero(),
            zero=zsub,
            vops=NF_VOPS,
        )
        return MapNF(space, trie, None if base.is_zero() else base)
    if isinstance(space, Biproduct):
        return PairNF(
            space,
            nf_product([nf.lhs for nf in nfs]),
            nf_product([nf.rhs for nf in nfs]),
        )
    if isinstance(space, Tensor):
        if not isinstance(space.lhs, (Free, CompactFree)):
            raise SpaceError(f"products over {space} are not supported; "
                             "the left tensor factor must be a free module")
        nested_space = _keyed_view_space(space)
        p = nf_product([_to_keyed(nf, nested_space) for nf in nfs])
        return _from_keyed(p, space)
    raise SpaceError(f"{space} has no product")


def _level(prim, factors, prod, add, sub, is_zero, zero, vops):
    """One level of the joint product. `factors` are (trie, baseline) pairs
    with non-vanishing baselines encoded by `is_zero`; returns the result's
    trie and baseline."""
    m = metrics.current
    n = len(factors)
    tcs = [tries.count(t) for t, _ in factors]
    counts = [tcs[i] + (0 if is_zero(factors[i][1]) else 1) for i in range(n)]
    restricting = [i for i in range(n) if is_zero(factors[i][1])]

    if restricting:
        enum_i = min(restricting, key=lambda i: (tcs[i], i))
        base_out = zero
    else:
        enum_i = min(range(n), key=lambda i: (counts[i], i))
        bases = [b for _, b in factors]
        base_out = prod(bases)
    if m.trace is not None:
        m.trace.append((tuple(counts), enum_i))

    entries = []
    if restricting:
        enum_trie, _ = factors[enum_i]
        for key, dev in tries.items(prim, enum_trie):
            vals = [None] * n
            vals[enum_i] = dev
            ok = True
            for j in range(n):
                if j == enum_i:
                    continue
                tj, bj = factors[j]
                d = tries.lookup(prim, tj, key)
                m.lookups += 1
                if d is None:
                    v = bj
                elif is_zero(bj):
                    v = d
                else:
                    v = add(bj, d)
                if is_zero(v):
                    ok = False
                    break
                vals[j] = v
            if not ok:
                continue
            v = prod(vals)
            if not is_zero(v):
                entries.append((key, v))
    else:
        # every factor has a baseline: any explicit key anywhere can deviate
        devs = {}
        for j in range(n):
            tj, _ = factors[j]
            for key, d in tries.items(prim, tj):
                row = devs.get(key)
                if row is None:
                    row = devs[key] = [None] * n
                row[j] = d
        for key in sorted(devs, key=prim.sort_key):
            row = devs[key]
            vals = []
            ok = True
            for j in range(n):
                bj = factors[j][1]
                d = row[j]
                v = bj if d is None else add(bj, d)
                if is_zero(v):
                    ok = False
                    break
                vals.append(v)
            if not ok:
                dv = sub(zero, base_out)
            else:
                dv = sub(prod(vals), base_out)
            if not is_zero(dv):
                entries.append((key, dv))

    trie = None
    for key, v in entries:
        s = tries.single(prim, key, v, vops)
        trie = s if trie is None else tries.merge(prim, trie, s, vops)
    return trie, base_out


# conversions between tensor chains and keyed views ---------------------------

def _keyed_view_space(space: Tensor) -> Space:
    lhs = space.lhs
    if isinstance(lhs, CompactFree):
        return CompactMap(space.ring, lhs.prim, space.rhs)
    return FinMap(space.ring, lhs.prim, space.rhs)


def _to_keyed(nf: TensorNF, nested_space) -> MapNF:
    """View a tensor form with a free left factor as a keyed form.

    Honest cost: a summand with a compacted left factor of k keys fans out
    into k scaled copies of its right factor.
    """
    prim = nested_space.prim
    ring = nested_space.ring
    acc = MapNF(nested_space, None, None)
    for l, r in nf.summands:
        trie = None
        for key, c in tries.items(l.space.prim, l.trie):
            sub = nf_scale(c, r) if not ring.eq(c, ring.one) else r
            if sub.is_zero():
                continue
            s = tries.single(prim, key, sub, NF_VOPS)
            trie = s if trie is None else tries.merge(prim, trie, s, NF_VOPS)
        base = None
        if not ring.is_zero(l.base):
            base = nf_scale(l.base, r)
            if base.is_zero():
                base = None
        acc = nf_add(acc, MapNF(nested_space, trie, base))
    return acc


def _from_keyed(nf: MapNF, space: Tensor) -> TensorNF:
    """Inverse view: entries become generator-by-value summands."""
    lhs = space.lhs
    ring = space.ring
    summands = []
    for key, sub in tries.items(nf.space.prim, nf.trie):
        l = FreeNF(lhs, tries.single(lhs.prim, key, ring.one, ring_vops(ring)), ring.zero)
        summands.append((l, sub))
    if nf.base is not None:
        summands.append((FreeNF(lhs, None, ring.one), nf.base))
    return TensorNF(space, compact_summands(summands))


# the blunt oracle -------------------------------------------------------------

def naive_multiply(x: Term, y: Term) -> NormalForm:
    """Product by full distributivity; exponential blow-ups accepted.

    Every cross pair of generators is expanded, simplified by the delta
    rules and componentwise tensor multiplication, and the pile of results
    is normalised at the end. Differential-testing oracle only.
    """
    if x.space != y.space:
        raise SpaceError(f"product factors live in {x.space} and {y.space}")
    return normalize(_naive_term(x, y))


def _naive_term(x: Term, y: Term) -> Term:
    space = x.space
    ring = space.ring
    m = metrics.current
    parts = []
    ys = list(linear_combination(y))
    for cx, gx in linear_combination(x):
        for cy, gy in ys:
            m.pair_products += 1
            t = _gen_pair(gx, gy, space)
            if t is None:
                continue
            c = ring.mul(cx, cy)
            m.ring_mults += 1
            parts.append(scaled(c, t))
    return sum_terms(space, parts)


def _gen_pair(gx, gy, space):
    if isinstance(gx, MulGen):
        t = readback(nf_product([normalize(f) for f in gx.factors]))
        return _naive_term(t, GenTerm(space, gy))
    if isinstance(gy, MulGen):
        t = readback(nf_product([normalize(f) for f in gy.factors]))
        return _naive_term(GenTerm(space, gx), t)
    if isinstance(gx, OneGen):
        return GenTerm(space, gy)
    if isinstance(gy, OneGen):
        return GenTerm(space, gx)
    if isinstance(gx, WildOneGen):
        return GenTerm(space, gy)
    if isinstance(gy, WildOneGen):
        return GenTerm(space, gx)
    if isinstance(gx, InjGen):
        return GenTerm(space, gx) if gx.value == gy.value else None
    if isinstance(gx, WildMapsToGen):
        if isinstance(gy, WildMapsToGen):
            return wild_maps_to(_naive_term(gx.body, gy.body), space)
        return maps_to(gy.key, _naive_term(gx.body, gy.body), space)
    if isinstance(gx, MapsToGen):
        if isinstance(gy, WildMapsToGen):
            return maps_to(gx.key, _naive_term(gx.body, gy.body), space)
        if gx.key != gy.key:
            return None
        return maps_to(gx.key, _naive_term(gx.body, gy.body), space)
    if isinstance(gx, TensorGen):
        return tensor(_naive_term(gx.lhs, gy.lhs), _naive_term(gx.rhs, gy.rhs))
    if isinstance(gx, PairGen):
        return pair(_naive_term(gx.lhs, gy.lhs), _naive_term(gx.rhs, gy.rhs))
    raise SpaceError(f"cannot multiply generators of {space}")


# embeddings and the triangle query --------------------------------------------

def embed(t: Term, source, target) -> Term:
    """Send a chain over the attributes `source` into the compact chain over
    `target`, widening free factors and filling missing attributes with the
    unit. `source` and `target` are (name, prim) lists; the source attributes
    must appear in the target in the same order (reorder upstream)."""
    src = list(source)
    tgt = list(target)
    names = [n for n, _ in tgt]
    for n, _ in src:
        if n not in names:
            raise SpaceError(f"attribute {n!r} missing from the target schema")
    it = iter(names)
    for n, _ in src:
        for m in it:
            if m == n:
                break
        else:
            raise SpaceError(f"attribute {n!r} out of order for the target schema")
    return _embed(t, src, tgt)


def _compact_chain(ring, prims) -> Space:
    from .spaces import tensor_chain

    return tensor_chain(ring, prims, compact=True)


def _embed(t, src, tgt):
    ring = t.space.ring
    if not src:
        return unit_one(_compact_chain(ring, [p for _, p in tgt]))
    if src[0][0] != tgt[0][0]:
        rest = _embed(t, src, tgt[1:])
        return tensor(wild_one(CompactFree(ring, tgt[0][1])), rest)
    if len(src) == 1 and len(tgt) == 1:
        return _widen(t)
    if len(src) == 1:
        head = _widen(t)
        return tensor(head, unit_one(_compact_chain(ring, [p for _, p in tgt[1:]])))
    parts = []
    out_space = None
    for c, g in linear_combination(t):
        if isinstance(g, MulGen):
            sub = readback(nf_product([normalize(f) for f in g.factors]))
            img = _embed(sub, src, tgt)
        elif isinstance(g, TensorGen):
            img = tensor(_widen(g.lhs), _embed(g.rhs, src[1:], tgt[1:]))
        else:
            raise SpaceError(f"not a chain term: generator {type(g).__name__}")
        out_space = img.space
        parts.append(scaled(c, img))
    if out_space is None:
        out_space = Tensor(
            CompactFree(ring, src[0][1]),
            _compact_chain(ring, [p for _, p in tgt[1:]]),
        )
    return sum_terms(out_space, parts)


def _widen(t: Term) -> Term:
    """Functorial inclusion of a free module chain into the compact chain."""
    space = t.space
    if isinstance(space, CompactFree):
        return t
    if isinstance(space, Free):
        out = CompactFree(space.ring, space.prim)
        parts = []
        for c, g in linear_combination(t):
            if isinstance(g, InjGen):
                parts.append(scaled(c, inject(g.value, out)))
            elif isinstance(g, MulGen):
                sub = readback(nf_product([normalize(f) for f in g.factors]))
                parts.append(scaled(c, _widen(sub)))
            else:
                raise SpaceError("not a free chain factor")
        return sum_terms(out, parts)
    if isinstance(space, Tensor):
        parts = []
        out = None
        for c, g in linear_combination(t):
            if isinstance(g, TensorGen):
                img = tensor(_widen(g.lhs), _widen(g.rhs))
            elif isinstance(g, MulGen):
                sub = readback(nf_product([normalize(f) for f in g.factors]))
                img = _widen(sub)
            else:
                raise SpaceError("not a chain term")
            out = img.space
            parts.append(scaled(c, img))
        if out is None:
            out = _compact_chain(space.ring, _chain_prims_of(space))
        return sum_terms(out, parts)
    raise SpaceError(f"cannot widen {space}")


def _chain_prims_of(space):
    from .spaces import chain_prims

    prims = chain_prims(space)
    if prims is None:
        raise SpaceError(f"{space} is not a chain of free factors")
    return prims


def triangle(x: Term, y: Term, z: Term) -> NormalForm:
    """Cyclic three-way join over attributes (A, B), (A, C), (B, C)."""
    pa, pb = _chain_prims_of(x.space)
    pa2, pc = _chain_prims_of(y.space)
    pb2, pc2 = _chain_prims_of(z.space)
    if pa != pa2 or pb != pb2 or pc != pc2:
        raise SpaceError("triangle inputs do not share attribute types")
    tgt = [("A", pa), ("B", pb), ("C", pc)]
    xe = embed(x, [("A", pa), ("B", pb)], tgt)
    ye = embed(y, [("A", pa), ("C", pc)], tgt)
    ze = embed(z, [("B", pb), ("C", pc)], tgt)
    return multiply([xe, ye, ze])
