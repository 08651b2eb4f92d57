"""Key-indexed tries, one shape per primitive key family.

Integers use a big-endian Patricia trie over sign-adjusted 64-bit keys, so
negative keys enumerate before non-negative ones. Strings use a byte-level
radix trie. Booleans and tagged sums are fixed slot pairs, unit is a single
slot, and pair keys curry into a trie of tries. All structures are
immutable and persistent: merges share unchanged subtrees, lookup cost is
linear in the key size and independent of population.

Payloads are opaque. Callers pass a `ValueOps` describing how payloads
add, when they vanish, and how many keys a payload stands for (one, except
for the curried inner tries of pair keys). The empty trie is `None`.
Every node visit bumps `metrics.current.trie_edges`.
"""

from dataclasses import dataclass, field
from typing import Callable

from . import metrics
from .prims import Adjoined, Bool, Int64, Prod, Str, Sum, Unit


@dataclass(frozen=True)
class ValueOps:
    add: Callable
    is_zero: Callable
    count: Callable = field(default=lambda v: 1)


def _add_opt(a, b, vops):
    """None-aware payload addition; returns None when the sum vanishes."""
    if a is None:
        return b
    if b is None:
        return a
    s = vops.add(a, b)
    return None if vops.is_zero(s) else s


# ---------------------------------------------------------------------------
# Patricia trie on sign-adjusted 64-bit integers

_SIGN = 1 << 63
_M64 = (1 << 64) - 1


def _ukey(k):
    return (k & _M64) ^ _SIGN


def _skey(u):
    v = u ^ _SIGN
    return v - (1 << 64) if v & _SIGN else v


class PLeaf:
    __slots__ = ("ukey", "val", "count")

    def __init__(self, ukey, val, count):
        self.ukey = ukey
        self.val = val
        self.count = count


class PBranch:
    """Keys below share `prefix` above `bit`; left has the bit clear."""

    __slots__ = ("prefix", "bit", "left", "right", "count")

    def __init__(self, prefix, bit, left, right):
        self.prefix = prefix
        self.bit = bit
        self.left = left
        self.right = right
        self.count = left.count + right.count


def _p_prefix(t):
    return t.ukey if isinstance(t, PLeaf) else t.prefix


def _p_matches(u, prefix, bit):
    return (u & ~((bit << 1) - 1)) == prefix


def _p_join(t1, t2):
    p1, p2 = _p_prefix(t1), _p_prefix(t2)
    bit = 1 << ((p1 ^ p2).bit_length() - 1)
    prefix = p1 & ~((bit << 1) - 1)
    if p1 & bit:
        t1, t2 = t2, t1
    return PBranch(prefix, bit, t1, t2)


def _p_branch(prefix, bit, left, right):
    if left is None:
        return right
    if right is None:
        return left
    return PBranch(prefix, bit, left, right)


def _p_merge(a, b, vops):
    m = metrics.current
    m.trie_edges += 1
    if isinstance(a, PLeaf):
        if isinstance(b, PLeaf):
            if a.ukey == b.ukey:
                v = _add_opt(a.val, b.val, vops)
                return None if v is None else PLeaf(a.ukey, v, vops.count(v))
            return _p_join(a, b)
        a, b = b, a  # fall through with branch first
    if isinstance(b, PLeaf):
        if _p_matches(b.ukey, a.prefix, a.bit):
            if b.ukey & a.bit:
                return _p_branch(a.prefix, a.bit, a.left, _p_merge(a.right, b, vops))
            return _p_branch(a.prefix, a.bit, _p_merge(a.left, b, vops), a.right)
        return _p_join(a, b)
    # both branches
    if a.bit == b.bit and a.prefix == b.prefix:
        return _p_branch(
            a.prefix, a.bit, _p_merge(a.left, b.left, vops), _p_merge(a.right, b.right, vops)
        )
    if a.bit > b.bit and _p_matches(b.prefix, a.prefix, a.bit):
        if b.prefix & a.bit:
            return _p_branch(a.prefix, a.bit, a.left, _p_merge(a.right, b, vops))
        return _p_branch(a.prefix, a.bit, _p_merge(a.left, b, vops), a.right)
    if b.bit > a.bit and _p_matches(a.prefix, b.prefix, b.bit):
        if a.prefix & b.bit:
            return _p_branch(b.prefix, b.bit, b.left, _p_merge(a, b.right, vops))
        return _p_branch(b.prefix, b.bit, _p_merge(a, b.left, vops), b.right)
    return _p_join(a, b)


def _p_lookup(t, u):
    m = metrics.current
    while isinstance(t, PBranch):
        m.trie_edges += 1
        if not _p_matches(u, t.prefix, t.bit):
            return None
        t = t.right if u & t.bit else t.left
    m.trie_edges += 1
    return t.val if t.ukey == u else None


def _p_items(t):
    m = metrics.current
    stack = [t]
    while stack:
        n = stack.pop()
        m.trie_edges += 1
        if isinstance(n, PLeaf):
            yield _skey(n.ukey), n.val
        else:
            stack.append(n.right)
            stack.append(n.left)


def _p_map(t, fn, vops):
    metrics.current.trie_edges += 1
    if isinstance(t, PLeaf):
        v = fn(t.val)
        if v is None or vops.is_zero(v):
            return None
        return PLeaf(t.ukey, v, vops.count(v))
    return _p_branch(t.prefix, t.bit, _p_map(t.left, fn, vops), _p_map(t.right, fn, vops))


# ---------------------------------------------------------------------------
# Radix trie on utf-8 bytes

class RNode:
    """`val` is the payload for the key ending here; edges carry non-empty
    labels, sorted by first byte. Non-root nodes with no payload keep at
    least two edges (paths are compressed). `vcount` is the key count of
    the payload alone (0 when absent)."""

    __slots__ = ("val", "edges", "count")

    def __init__(self, val, edges, vcount):
        self.val = val
        self.edges = edges
        c = vcount
        for _, child in edges:
            c += child.count
        self.count = c


def _r_single(key: bytes, val, vops):
    leaf_count = vops.count(val)
    if key == b"":
        return RNode(val, (), leaf_count)
    return RNode(None, ((key, RNode(val, (), leaf_count)),), 0)


def _common_prefix_len(a: bytes, b: bytes) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def _r_compress(label, child):
    if child.val is None and len(child.edges) == 1:
        sub_label, sub_child = child.edges[0]
        return label + sub_label, sub_child
    return label, child


def _r_node(val, edges, vops):
    if val is None and not edges:
        return None
    return RNode(val, tuple(edges), 0 if val is None else vops.count(val))


def _r_merge(a, b, vops):
    metrics.current.trie_edges += 1
    val = _add_opt(a.val, b.val, vops)
    ea, eb = a.edges, b.edges
    i = j = 0
    out = []
    while i < len(ea) and j < len(eb):
        la, ca = ea[i]
        lb, cb = eb[j]
        if la[0] < lb[0]:
            out.append(ea[i])
            i += 1
        elif lb[0] < la[0]:
            out.append(eb[j])
            j += 1
        else:
            p = _common_prefix_len(la, lb)
            if p == len(la) == len(lb):
                child = _r_merge(ca, cb, vops)
            elif p == len(la):
                child = _r_merge(ca, RNode(None, ((lb[p:], cb),), 0), vops)
            elif p == len(lb):
                child = _r_merge(RNode(None, ((la[p:], ca),), 0), cb, vops)
            else:
                sub = [(la[p:], ca), (lb[p:], cb)]
                sub.sort(key=lambda e: e[0])
                child = RNode(None, tuple(sub), 0)
            if child is not None:
                out.append(_r_compress(la[:p], child))
            i += 1
            j += 1
    out.extend(ea[i:])
    out.extend(eb[j:])
    return _r_node(val, out, vops)


def _r_lookup(t, key: bytes):
    m = metrics.current
    node = t
    i = 0
    while True:
        m.trie_edges += 1
        if i == len(key):
            return node.val
        nxt = None
        c = key[i]
        for label, child in node.edges:
            if label[0] == c:
                nxt = (label, child)
                break
            if label[0] > c:
                break
        if nxt is None:
            return None
        label, child = nxt
        if key[i : i + len(label)] != label:
            return None
        i += len(label)
        node = child


def _r_items(t, prefix=b""):
    metrics.current.trie_edges += 1
    if t.val is not None:
        yield prefix.decode("utf-8"), t.val
    for label, child in t.edges:
        yield from _r_items(child, prefix + label)


def _r_map(t, fn, vops):
    metrics.current.trie_edges += 1
    val = t.val
    if val is not None:
        val = fn(val)
        if val is not None and vops.is_zero(val):
            val = None
    out = []
    for label, child in t.edges:
        c = _r_map(child, fn, vops)
        if c is not None:
            out.append(_r_compress(label, c))
    return _r_node(val, out, vops)


# ---------------------------------------------------------------------------
# Slot-shaped tries: unit, bool, sums, adjoined markers

class UNode:
    __slots__ = ("val", "count")

    def __init__(self, val, count):
        self.val = val
        self.count = count


class BNode:
    __slots__ = ("f", "t", "count")

    def __init__(self, f, t, count):
        self.f = f
        self.t = t
        self.count = count


class SNode:
    """Sub-tries for left-tagged and right-tagged keys."""

    __slots__ = ("left", "right", "count")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.count = (left.count if left else 0) + (right.count if right else 0)


class ANode:
    """Payload at the adjoined marker plus a base-set sub-trie."""

    __slots__ = ("mark", "base", "count")

    def __init__(self, mark, base, mark_count):
        self.mark = mark
        self.base = base
        self.count = mark_count + (base.count if base else 0)


# ---------------------------------------------------------------------------
# Prim-directed dispatch

def single(prim, key, val, vops):
    """One-entry trie. The payload must be non-vanishing."""
    if isinstance(prim, Int64):
        return PLeaf(_ukey(key), val, vops.count(val))
    if isinstance(prim, Str):
        return _r_single(key.encode("utf-8"), val, vops)
    if isinstance(prim, Unit):
        return UNode(val, vops.count(val))
    if isinstance(prim, Bool):
        c = vops.count(val)
        return BNode(None, val, c) if key else BNode(val, None, c)
    if isinstance(prim, Sum):
        tag, k = key
        if tag == "L":
            return SNode(single(prim.lhs, k, val, vops), None)
        return SNode(None, single(prim.rhs, k, val, vops))
    if isinstance(prim, Prod):
        inner = single(prim.snd, key[1], val, vops)
        return single(prim.fst, key[0], inner, _outer_vops(prim, vops))
    if isinstance(prim, Adjoined):
        if key is prim.marker:
            return ANode(val, None, vops.count(val))
        return ANode(None, single(prim.base, key, val, vops), 0)
    raise TypeError(f"no trie for {prim}")


def _outer_vops(prim, vops):
    snd = prim.snd
    return ValueOps(
        add=lambda x, y: merge(snd, x, y, vops),
        is_zero=lambda t: t is None,
        count=lambda t: t.count,
    )


def merge(prim, a, b, vops):
    """Additive union; linear in the smaller side plus shared paths."""
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(prim, Int64):
        return _p_merge(a, b, vops)
    if isinstance(prim, Str):
        return _r_merge(a, b, vops)
    if isinstance(prim, Unit):
        metrics.current.trie_edges += 1
        v = _add_opt(a.val, b.val, vops)
        return None if v is None else UNode(v, vops.count(v))
    if isinstance(prim, Bool):
        metrics.current.trie_edges += 1
        f = _add_opt(a.f, b.f, vops)
        t = _add_opt(a.t, b.t, vops)
        if f is None and t is None:
            return None
        c = (vops.count(f) if f is not None else 0) + (vops.count(t) if t is not None else 0)
        return BNode(f, t, c)
    if isinstance(prim, Sum):
        metrics.current.trie_edges += 1
        l = merge(prim.lhs, a.left, b.left, vops)
        r = merge(prim.rhs, a.right, b.right, vops)
        if l is None and r is None:
            return None
        return SNode(l, r)
    if isinstance(prim, Prod):
        return merge(prim.fst, a, b, _outer_vops(prim, vops))
    if isinstance(prim, Adjoined):
        metrics.current.trie_edges += 1
        mk = _add_opt(a.mark, b.mark, vops)
        base = merge(prim.base, a.base, b.base, vops)
        if mk is None and base is None:
            return None
        return ANode(mk, base, vops.count(mk) if mk is not None else 0)
    raise TypeError(f"no trie for {prim}")


def lookup(prim, t, key):
    """Payload at `key`, or None. Work is linear in the size of the key."""
    if t is None:
        return None
    if isinstance(prim, Int64):
        return _p_lookup(t, _ukey(key))
    if isinstance(prim, Str):
        return _r_lookup(t, key.encode("utf-8"))
    if isinstance(prim, Unit):
        metrics.current.trie_edges += 1
        return t.val
    if isinstance(prim, Bool):
        metrics.current.trie_edges += 1
        return t.t if key else t.f
    if isinstance(prim, Sum):
        metrics.current.trie_edges += 1
        tag, k = key
        if tag == "L":
            return lookup(prim.lhs, t.left, k)
        return lookup(prim.rhs, t.right, k)
    if isinstance(prim, Prod):
        inner = lookup(prim.fst, t, key[0])
        return lookup(prim.snd, inner, key[1])
    if isinstance(prim, Adjoined):
        metrics.current.trie_edges += 1
        if key is prim.marker:
            return t.mark
        return lookup(prim.base, t.base, key)
    raise TypeError(f"no trie for {prim}")


def items(prim, t):
    """All (key, payload) entries in the set's total order."""
    if t is None:
        return
    if isinstance(prim, Int64):
        yield from _p_items(t)
    elif isinstance(prim, Str):
        yield from _r_items(t)
    elif isinstance(prim, Unit):
        metrics.current.trie_edges += 1
        yield (), t.val
    elif isinstance(prim, Bool):
        metrics.current.trie_edges += 1
        if t.f is not None:
            yield False, t.f
        if t.t is not None:
            yield True, t.t
    elif isinstance(prim, Sum):
        metrics.current.trie_edges += 1
        for k, v in items(prim.lhs, t.left):
            yield ("L", k), v
        for k, v in items(prim.rhs, t.right):
            yield ("R", k), v
    elif isinstance(prim, Prod):
        for ka, inner in items(prim.fst, t):
            for kb, v in items(prim.snd, inner):
                yield (ka, kb), v
    elif isinstance(prim, Adjoined):
        metrics.current.trie_edges += 1
        if prim.marker_first and t.mark is not None:
            yield prim.marker, t.mark
        yield from items(prim.base, t.base)
        if not prim.marker_first and t.mark is not None:
            yield prim.marker, t.mark
    else:
        raise TypeError(f"no trie for {prim}")


def map_values(prim, t, fn, vops):
    """Apply fn to every payload; entries whose image vanishes are dropped."""
    if t is None:
        return None
    if isinstance(prim, Int64):
        return _p_map(t, fn, vops)
    if isinstance(prim, Str):
        return _r_map(t, fn, vops)
    if isinstance(prim, Unit):
        metrics.current.trie_edges += 1
        v = fn(t.val)
        if v is None or vops.is_zero(v):
            return None
        return UNode(v, vops.count(v))
    if isinstance(prim, Bool):
        metrics.current.trie_edges += 1

        def app(v):
            if v is None:
                return None
            w = fn(v)
            return None if (w is None or vops.is_zero(w)) else w

        f, tt = app(t.f), app(t.t)
        if f is None and tt is None:
            return None
        c = (vops.count(f) if f is not None else 0) + (vops.count(tt) if tt is not None else 0)
        return BNode(f, tt, c)
    if isinstance(prim, Sum):
        metrics.current.trie_edges += 1
        l = map_values(prim.lhs, t.left, fn, vops)
        r = map_values(prim.rhs, t.right, fn, vops)
        if l is None and r is None:
            return None
        return SNode(l, r)
    if isinstance(prim, Prod):
        ov = _outer_vops(prim, vops)
        return map_values(prim.fst, t, lambda inner: map_values(prim.snd, inner, fn, vops), ov)
    if isinstance(prim, Adjoined):
        metrics.current.trie_edges += 1
        mk = t.mark
        if mk is not None:
            mk = fn(mk)
            if mk is not None and vops.is_zero(mk):
                mk = None
        base = map_values(prim.base, t.base, fn, vops)
        if mk is None and base is None:
            return None
        return ANode(mk, base, vops.count(mk) if mk is not None else 0)
    raise TypeError(f"no trie for {prim}")


def count(t) -> int:
    return 0 if t is None else t.count


def from_items(prim, pairs, vops):
    """Build a trie from (key, payload) pairs, adding collisions together."""
    t = None
    for k, v in pairs:
        if vops.is_zero(v):
            continue
        t = merge(prim, t, single(prim, k, v, vops), vops)
    return t
