"""The join evaluator: goldens, algebra laws, scheduling, differential checks."""

import pytest

from polyalg import (
    GF2,
    INT,
    STAR,
    STRING,
    Z,
    CompactFree,
    CompactMap,
    FinMap,
    Free,
    Scalar,
    SpaceError,
    Tensor,
    embed,
    enumerate_nf,
    inject,
    maps_to,
    metrics,
    multiply,
    naive_multiply,
    nf_equal,
    nf_lookup_path,
    normalize,
    readback,
    scale,
    sum_terms,
    tensor,
    tensor_chain,
    triangle,
    unit_one,
    weight,
    wild_one,
    zero,
)

from conftest import rand_term

FS = Free(Z, STRING)
FI = Free(Z, INT)
CS = CompactFree(Z, STRING)
CI = CompactFree(Z, INT)


def strs(xs, space=FS):
    return sum_terms(space, [inject(x, space) for x in xs])


def pairs_rel(pairs, s1, s2):
    return sum_terms(
        Tensor(s1, s2), [tensor(inject(u, s1), inject(v, s2)) for u, v in pairs]
    )


def test_intersection_goldens():
    a, b, c, d = (inject(x, FS) for x in "abcd")
    out = multiply([3 * a + 2 * b + 5 * c, 7 * b + 4 * c + 2 * d])
    assert enumerate_nf(out) == [(("b",), 14), (("c",), 20)]
    out2 = multiply([2 * a + 3 * b, 5 * b + 7 * c])
    assert enumerate_nf(out2) == [(("b",), 15)]


def test_single_factor_is_normalisation():
    t = tensor(inject("a", CS), inject(1, CI)) + tensor(inject("a", CS), inject(1, CI))
    assert nf_equal(multiply([t]), normalize(t))


def test_keyed_entries_delta_rule():
    cm = FinMap(Z, STRING, FS)
    x = maps_to("a", inject("u", FS), cm)
    y = maps_to("b", inject("u", FS), cm)
    assert multiply([x, y]).is_zero()
    same = multiply([x, maps_to("a", 3 * inject("u", FS), cm)])
    assert enumerate_nf(same) == [(("a", "u"), 3)]


def test_unit_law_in_compact_spaces(rng):
    for space in (CS, Tensor(CS, CI), CompactMap(Z, STRING, CI)):
        for _ in range(20):
            x = rand_term(rng, space, size=4)
            assert nf_equal(multiply([unit_one(space), x]), normalize(x))


def test_algebra_laws_after_normalisation(rng):
    for ring in (Z, GF2):
        space = Tensor(CompactFree(ring, STRING), CompactFree(ring, INT))
        for _ in range(25):
            x = rand_term(rng, space, size=3)
            y = rand_term(rng, space, size=3)
            z = rand_term(rng, space, size=3)
            assert nf_equal(multiply([x, y]), multiply([y, x]))
            assert nf_equal(
                multiply([readback(multiply([x, y])), z]),
                multiply([x, readback(multiply([y, z]))]),
            )
            lhs = multiply([x + y, z])
            rhs = normalize(readback(multiply([x, z])) + readback(multiply([y, z])))
            assert nf_equal(lhs, rhs)
            assert multiply([x, zero(space)]).is_zero()
            sx = scale(ring.coerce(2) if ring is Z else True, x)
            assert nf_equal(multiply([sx, y]), normalize(scale(
                2 if ring is Z else True, readback(multiply([x, y])))))


def test_worked_join_example():
    x = pairs_rel([("a", 1), ("b", 2), ("c", 3)], FS, FI)
    y = pairs_rel([(2, "p"), (3, "q"), (4, "r")], FI, FS)
    A, B, C = ("A", STRING), ("B", INT), ("C", STRING)
    x2 = embed(x, [A, B], [A, B, C])
    y2 = embed(y, [B, C], [A, B, C])
    assert enumerate_nf(multiply([x2, y2])) == [
        (("b", 2, "p"), 1),
        (("c", 3, "q"), 1),
    ]
    # the blunt expansion agrees, step by step
    assert enumerate_nf(naive_multiply(x2, y2)) == [
        (("b", 2, "p"), 1),
        (("c", 3, "q"), 1),
    ]


def test_embed_examples():
    x = pairs_rel([("a", 1), ("b", 2), ("c", 3)], FS, FI)
    A, B, C = ("A", STRING), ("B", INT), ("C", STRING)
    e = embed(x, [A, B], [A, B, C])
    rows = enumerate_nf(normalize(e), allow_baseline=True)
    assert rows == [
        (("a", 1, STAR), 1),
        (("b", 2, STAR), 1),
        (("c", 3, STAR), 1),
    ]
    # identity schema embeds by inclusion only
    same = embed(x, [A, B], [A, B])
    assert enumerate_nf(normalize(same)) == [
        (("a", 1), 1),
        (("b", 2), 1),
        (("c", 3), 1),
    ]
    with pytest.raises(SpaceError):
        embed(x, [A, B], [A, C])


def test_embed_preserves_weight(rng):
    A, B, C = ("A", STRING), ("B", INT), ("C", STRING)
    for _ in range(20):
        x = rand_term(rng, Tensor(FS, FI), size=4)
        assert weight(embed(x, [A, B], [A, B, C])) == weight(x)


def test_differential_small_cases(rng):
    for trial in range(150):
        ring = Z if trial % 2 else GF2
        m = rng.randint(1, 3)
        space = tensor_chain(ring, [INT] * m, compact=True) if m > 1 else CompactFree(ring, INT)
        x = rand_term(rng, space, size=5)
        y = rand_term(rng, space, size=5)
        assert nf_equal(multiply([x, y]), naive_multiply(x, y))


def test_three_way_differential(rng):
    space = tensor_chain(Z, [INT, INT], compact=True)
    for _ in range(60):
        x = rand_term(rng, space, size=3)
        y = rand_term(rng, space, size=3)
        z = rand_term(rng, space, size=3)
        joint = multiply([x, y, z])
        folded = naive_multiply(readback(naive_multiply(x, y)), z)
        assert nf_equal(joint, folded)


def test_wildcard_closure_by_lookup(rng):
    space = tensor_chain(Z, [INT, INT], compact=True)
    for _ in range(40):
        x = rand_term(rng, space, size=4)
        y = rand_term(rng, space, size=4)
        out = multiply([x, y])
        nx, ny = normalize(x), normalize(y)
        keys = [(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(4)]
        probes = [(a, b) for a, b in keys] + [(STAR, STAR)]
        for pa, pb in probes:
            got = nf_lookup_path(out, (pa, pb))
            want = nf_lookup_path(nx, (pa, pb)) * nf_lookup_path(ny, (pa, pb))
            assert got == want, (pa, pb)


def test_enumerator_picks_fewest_components():
    # x has two keys and no baseline, y is baseline-only: x restricts
    x = inject(1, CI) + inject(2, CI)
    y = wild_one(CI)
    with metrics.fresh(trace=True) as m:
        multiply([y, x])
    ((counts, chosen),) = m.trace
    assert counts == (1, 2)
    assert chosen == 1  # the restricting factor, despite y's smaller count
    # among restricting factors, the smaller one wins; ties go left
    a = inject(1, CI) + inject(2, CI) + inject(3, CI)
    b = inject(1, CI) + inject(2, CI)
    with metrics.fresh(trace=True) as m:
        multiply([a, b])
    ((counts, chosen),) = m.trace
    assert counts == (3, 2) and chosen == 1
    # all-baseline products record the global minimum
    with metrics.fresh(trace=True) as m:
        multiply([wild_one(CI) + inject(1, CI), wild_one(CI)])
    ((counts, chosen),) = m.trace
    assert counts == (2, 1) and chosen == 1


def test_zero_prune_skips_deeper_levels():
    # the first-level lookup for key 3 misses, so none of its 50-entry
    # subtree is ever visited; measure the product alone on prebuilt forms
    from polyalg.product import nf_product

    cm = CompactMap(Z, INT, CI)
    inner_big = sum_terms(CI, [inject(j, CI) for j in range(50)])
    x = normalize(maps_to(1, inject(1, CI), cm) + maps_to(2, inner_big, cm))
    y = normalize(maps_to(1, inject(1, CI), cm) + maps_to(3, inner_big, cm))
    with metrics.fresh() as m:
        out = nf_product([y, x])
    rows = enumerate_nf(out)
    assert rows == [((1, 1), 1)]
    # first-level probes for keys 1 and 3 plus one second-level probe under
    # key 1; key 3 prunes before recursion and key 2 is never enumerated
    assert m.lookups == 3
    assert m.trie_edges < 40


def test_triangle_small_instances():
    grid = [(i, j) for i in (1, 2) for j in (1, 2)]
    x = pairs_rel(grid, FI, FI)
    y = pairs_rel(grid, FI, FI)
    z = pairs_rel(grid, FI, FI)
    out = triangle(x, y, z)
    rows = enumerate_nf(out)
    assert len(rows) == 8
    assert all(c == 1 for _, c in rows)
    # brute force oracle: all (a, b, c) with (a,b) in x, (a,c) in y, (b,c) in z
    want = sorted(
        (a, b, c)
        for a, b in grid
        for c in (1, 2)
        if (a, c) in grid and (b, c) in grid
    )
    assert [k for k, _ in rows] == want

    single = triangle(
        pairs_rel([(1, 1)], FI, FI),
        pairs_rel([(1, 2)], FI, FI),
        pairs_rel([(1, 2)], FI, FI),
    )
    assert enumerate_nf(single) == [((1, 1, 2), 1)]

    empty = triangle(pairs_rel([(1, 1)], FI, FI), zero(Tensor(FI, FI)), z)
    assert empty.is_zero()


def test_multiplicities_multiply_through_joins():
    x = scale(2, tensor(inject("a", FS), inject(1, FI)))
    y = scale(3, tensor(inject(1, FI), inject("p", FS)))
    A, B, C = ("A", STRING), ("B", INT), ("C", STRING)
    out = multiply([embed(x, [A, B], [A, B, C]), embed(y, [B, C], [A, B, C])])
    assert enumerate_nf(out) == [(("a", 1, "p"), 6)]


def test_scalar_and_biproduct_products():
    from polyalg import pair, scalar

    s = multiply([scalar(Z, 3), scalar(Z, 4)])
    assert s.value == 12
    p = multiply([pair(inject("a", FS), inject(1, FI)), pair(inject("a", FS), inject(2, FI))])
    rows = enumerate_nf(p)
    assert rows == [((1, "a"), 1)]


def test_product_requires_free_left_tensor_factor():
    from polyalg import scalar

    bad = Tensor(FinMap(Z, STRING, Scalar(Z)), FS)
    entry = maps_to("k", scalar(Z, 1), FinMap(Z, STRING, Scalar(Z)))
    x = tensor(entry, inject("a", FS))
    with pytest.raises(SpaceError):
        multiply([x, x])
