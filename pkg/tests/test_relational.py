"""Relational operations over ring-weighted relations."""

import pytest

from polyalg import (
    GF2,
    INT,
    STAR,
    STRING,
    Z,
    Compare,
    BoolPred,
    RelationError,
    aggregate,
    apply_update,
    cartesian,
    clamp_nonneg,
    diff,
    intersect,
    map_col,
    natural_join,
    outer_join,
    project,
    relabel,
    relation_from_rows,
    rename,
    schema,
    select,
    union,
    weight,
)
from polyalg.terms import GenTerm, ScaleTerm, TensorGen


def rel(cols, rows, ring=Z):
    return relation_from_rows(schema(*cols), ring, [(r, ring.one) for r in rows])


def weighted(cols, rows, ring=Z):
    return relation_from_rows(schema(*cols), ring, rows)


def rowdict(r):
    return dict(r.rows())


AB = [("A", STRING), ("B", INT)]
X3 = [("a", 1), ("b", 2), ("c", 3)]
Y3 = [(2, "p"), (3, "q"), (4, "r")]


def test_select_by_length_style_predicate():
    from polyalg import ColumnWhere

    r = rel([("A", STRING)], [("foo",), ("ab",)])
    out = select(r, ColumnWhere("A", lambda s: len(s) == 3))
    assert rowdict(out) == {("foo",): 1}
    byeq = select(r, Compare("=", "A", "foo"))
    assert rowdict(byeq) == {("foo",): 1}
    none = select(r, Compare("=", "A", "zzz"))
    assert rowdict(none) == {}


def test_select_preserves_multiplicity_and_linearity(rng):
    r = weighted([("A", INT)], [((1,), 2), ((2,), -3), ((5,), 1)])
    out = select(r, Compare("<", "A", 3))
    assert rowdict(out) == {(1,): 2, (2,): -3}
    # always-true keeps everything
    allr = select(r, Compare("<", "A", 100))
    assert allr.equals(r)


def test_select_multi_column_and_bool_preds():
    r = rel(AB + [("C", INT)], [("a", 1, 1), ("a", 1, 2), ("b", 2, 2)])
    out = select(r, Compare("=", "B", other_column="C"))
    assert rowdict(out) == {("a", 1, 1): 1, ("b", 2, 2): 1}
    both = select(
        r, BoolPred("and", (Compare("=", "A", "a"), Compare(">", "C", 1)))
    )
    assert rowdict(both) == {("a", 1, 2): 1}
    inv = select(r, BoolPred("not", (Compare("=", "A", "a"),)))
    assert rowdict(inv) == {("b", 2, 2): 1}


def test_select_type_mismatch_is_an_error():
    r = rel(AB, X3)
    with pytest.raises(RelationError):
        select(r, Compare("=", "A", 3))


def test_project_preserves_multiplicities():
    r = rel(AB, [("foo", 1), ("foo", 2), ("bar", 3)])
    out = project(r, ["A"])
    assert rowdict(out) == {("foo",): 2, ("bar",): 1}
    # over gf2 the discarded column's weights add mod 2, so a value backed
    # by an even number of rows cancels; projection is linear, not the
    # classical idempotent set collapse
    r2 = rel(AB, [("foo", 1), ("foo", 2), ("bar", 3)], ring=GF2)
    out2 = project(r2, ["A"])
    assert rowdict(out2) == {("bar",): True}
    r3 = rel(AB, [("foo", 1), ("bar", 3)], ring=GF2)
    assert rowdict(project(r3, ["A"])) == {("bar",): True, ("foo",): True}


def test_project_stays_symbolic():
    # a projection of a product keeps m * (sum) unexpanded in the term
    r = rel([("A", STRING)], [("a1",), ("a2",), ("a3",)])
    s = rel([("B", INT)], [(1,), (2,)])
    t = cartesian(r, s)
    out = project(t, ["B"])
    term = out.term
    assert isinstance(term, ScaleTerm) and term.coeff == 3
    assert rowdict(out) == {(1,): 3, (2,): 3}


def test_project_reorders_and_validates():
    r = rel(AB + [("C", STRING)], [("a", 1, "p"), ("b", 2, "q")])
    out = project(r, ["C", "A"])
    assert out.schema.names == ["C", "A"]
    assert rowdict(out) == {("p", "a"): 1, ("q", "b"): 1}
    assert project(r, ["A", "B", "C"]).equals(r)
    with pytest.raises(RelationError):
        project(r, [])
    with pytest.raises(RelationError):
        project(r, ["A", "A"])


def test_rename_permutes_and_inverts(rng):
    r = rel(AB + [("C", STRING)], [("a", 1, "p"), ("b", 2, "q"), ("b", 5, "p")])
    out = rename(r, [2, 0, 1])
    assert out.schema.names == ["C", "A", "B"]
    assert rowdict(out) == {("p", "a", 1): 1, ("q", "b", 2): 1, ("p", "b", 5): 1}
    back = rename(out, [1, 2, 0])
    assert back.equals(r)
    assert weight(out.term) == weight(r.term)
    with pytest.raises(RelationError):
        rename(r, [0, 0, 1])


def test_union_diff_intersect_goldens():
    r = rel([("A", STRING)], [("a",), ("b",)])
    s = rel([("A", STRING)], [("b",), ("c",)])
    assert rowdict(union(r, s)) == {("a",): 1, ("b",): 2, ("c",): 1}
    assert rowdict(diff(r, r)) == {}
    t = weighted([("A", STRING)], [(("a",), 2), (("b",), 3)])
    u = weighted([("A", STRING)], [(("b",), 5), (("c",), 7)])
    assert rowdict(intersect(t, u)) == {("b",): 15}
    with pytest.raises(RelationError):
        union(r, rel([("B", STRING)], [("a",)]))


def test_cartesian_is_one_node_and_weights_multiply():
    r = rel([("A", STRING)], [("a1",), ("a2",), ("a3",)])
    s = rel([("B", INT)], [(1,), (2,)])
    t = cartesian(r, s)
    assert isinstance(t.term, GenTerm) and isinstance(t.term.gen, TensorGen)
    assert weight(t.term) == 6
    assert len(t.rows()) == 6
    empty = cartesian(rel([("A", STRING)], []), s)
    assert rowdict(empty) == {}
    with pytest.raises(RelationError):
        cartesian(r, rel([("A", INT)], [(1,)]))


def test_natural_join_worked_example():
    x = rel(AB, X3)
    y = rel([("B", INT), ("C", STRING)], Y3)
    out = natural_join([x, y])
    assert out.schema.names == ["A", "B", "C"]
    assert rowdict(out) == {("b", 2, "p"): 1, ("c", 3, "q"): 1}
    assert not out.has_baseline()


def test_join_matches_set_oracle_over_gf2(rng):
    for _ in range(30):
        xs = {(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(0, 6))}
        ys = {(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(0, 6))}
        x = rel([("A", INT), ("B", INT)], sorted(xs), ring=GF2)
        y = rel([("B", INT), ("C", INT)], sorted(ys), ring=GF2)
        out = rowdict(natural_join([x, y]))
        want = {
            (a, b, c)
            for a, b in xs
            for b2, c in ys
            if b == b2
        }
        assert set(out) == want
        assert all(v is True for v in out.values())


def test_self_join_idempotent_over_gf2(rng):
    rows = {(rng.randint(0, 4), rng.randint(0, 4)) for _ in range(5)}
    r = rel([("A", INT), ("B", INT)], sorted(rows), ring=GF2)
    assert natural_join([r, r]).equals(r)


def test_join_rename_applied_automatically():
    # y's columns arrive in (C, B) order; join still matches on B by name
    x = rel(AB, X3)
    y = rel([("C", STRING), ("B", INT)], [(c, b) for b, c in Y3])
    out = natural_join([x, y])
    assert out.schema.names == ["A", "B", "C"]
    assert rowdict(out) == {("b", 2, "p"): 1, ("c", 3, "q"): 1}


def test_join_type_conflict():
    x = rel(AB, X3)
    y = rel([("B", STRING), ("C", STRING)], [("2", "p")])
    with pytest.raises(RelationError):
        natural_join([x, y])


def test_outer_joins_with_wildcards():
    x = rel(AB, X3)
    y = rel([("B", INT), ("C", STRING)], Y3)
    full = outer_join("full", x, y)
    assert full.has_baseline()
    rows = rowdict(full)
    # matched rows, each side's leftovers against the wildcard, and the unit
    assert rows[("b", 2, "p")] == 1 and rows[("c", 3, "q")] == 1
    assert rows[("a", 1, STAR)] == 1
    assert rows[(STAR, 4, "r")] == 1
    assert rows[(STAR, STAR, STAR)] == 1
    assert len(rows) == 9
    # cumulative value semantics: a matched tuple is covered by the match,
    # both wildcard leftovers and the unit
    assert full.lookup(("b", 2, "p")) == 4
    left = outer_join("left", x, y)
    lrows = rowdict(left)
    assert lrows[("a", 1, STAR)] == 1
    assert (STAR, 4, "r") not in lrows
    right = outer_join("right", x, y)
    rrows = rowdict(right)
    assert rrows[(STAR, 4, "r")] == 1
    assert ("a", 1, STAR) not in rrows


def test_outer_join_distributivity_identities(rng):
    from polyalg import multiply, nf_equal, normalize, readback, unit_one
    from polyalg.relational import _embedded_terms, _join_target

    for _ in range(15):
        xs = [(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(1, 5))]
        ys = [(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(1, 5))]
        x = rel([("A", INT), ("B", INT)], sorted(set(xs)))
        y = rel([("B", INT), ("C", INT)], sorted(set(ys)))
        target = _join_target([x, y])
        xe, ye = _embedded_terms([x, y], target)
        u = unit_one(xe.space)
        lhs = multiply([xe, ye + u])
        rhs = normalize(readback(multiply([xe, ye])) + xe)
        assert nf_equal(lhs, rhs)
        lhs2 = multiply([xe + u, ye + u])
        rhs2 = normalize(readback(multiply([xe, ye])) + xe + ye + u)
        assert nf_equal(lhs2, rhs2)


def test_outer_join_with_empty_side():
    x = rel(AB, X3)
    y = rel([("B", INT), ("C", STRING)], [])
    # (x' + 1) * (0 + 1) = x' + 1: x at concrete keys plus baseline 1
    full = outer_join("full", x, y)
    rows = rowdict(full)
    assert rows == {
        ("a", 1, STAR): 1,
        ("b", 2, STAR): 1,
        ("c", 3, STAR): 1,
        (STAR, STAR, STAR): 1,
    }
    assert full.lookup(("a", 1, "fresh")) == 2
    assert full.lookup((STAR, 9, "zz")) == 1


def test_aggregate_goldens():
    r = rel([("A", STRING), ("B", INT)], [("p", 2), ("p", 3), ("q", 4)])
    s = aggregate(r, ["A"], "B", "sum")
    assert rowdict(s) == {("p",): 5, ("q",): 4}
    mn = aggregate(r, ["A"], "B", "min")
    assert [k for k, _ in mn.rows()] == [("p", 2), ("q", 4)]
    mx = aggregate(r, ["A"], "B", "max")
    assert [k for k, _ in mx.rows()] == [("p", 3), ("q", 4)]
    ct = aggregate(r, ["A"], "B", "count")
    assert rowdict(ct) == {("p",): 2, ("q",): 1}


def test_aggregate_guards():
    r = rel([("A", STRING), ("B", INT)], [("p", 2)], ring=GF2)
    with pytest.raises(RelationError):
        aggregate(r, ["A"], "B", "sum")
    z = rel([("A", STRING), ("B", INT)], [("p", 2)])
    with pytest.raises(RelationError):
        aggregate(z, [], "B", "sum")
    with pytest.raises(RelationError):
        aggregate(z, ["A"], "A", "min")
    s = rel([("A", STRING), ("B", STRING)], [("p", "x")])
    with pytest.raises(RelationError):
        aggregate(s, ["A"], "B", "min")


def test_aggregate_min_handles_cancelled_values():
    r = weighted(
        [("A", STRING), ("B", INT)],
        [(("p", 2), 1), (("p", 2), -1), (("p", 3), 1)],
    )
    mn = aggregate(r, ["A"], "B", "min")
    assert [k for k, _ in mn.rows()] == [("p", 3)]


def test_map_col_goldens():
    r = rel([("A", STRING)], [("foo",), ("bar",)])
    up = map_col(r, "A", "upper")
    assert rowdict(up) == {("FOO",): 1, ("BAR",): 1}
    const = map_col(r, "A", lambda s: "c")
    assert rowdict(const) == {("c",): 2}
    ident = map_col(r, "A", lambda s: s)
    assert ident.equals(r)
    length = map_col(r, "A", "length")
    assert rowdict(length) == {(3,): 2}
    assert length.schema.columns[0][1] == INT
    with pytest.raises(RelationError):
        map_col(r, "A", "abs")
    with pytest.raises(RelationError):
        map_col(r, "A", "no_such_fn")


def test_updates_are_additions():
    db = rel([("A", STRING)], [("a",), ("b",)])
    delta = weighted([("A", STRING)], [(("c",), 1), (("b",), -1)])
    out = apply_update(db, delta)
    assert rowdict(out) == {("a",): 1, ("c",): 1}
    # applying to a database missing b leaves a negative occurrence
    small = rel([("A", STRING)], [("a",)])
    neg = apply_update(small, delta)
    assert rowdict(neg) == {("a",): 1, ("b",): -1, ("c",): 1}
    fixed = apply_update(neg, rel([("A", STRING)], [("b",)]))
    assert rowdict(fixed) == {("a",): 1, ("c",): 1}


def test_update_order_irrelevant(rng):
    base = weighted([("A", INT)], [((i,), rng.randint(-2, 2) or 1) for i in range(4)])
    deltas = [
        weighted([("A", INT)], [((rng.randint(0, 5),), rng.choice([-1, 1]))])
        for _ in range(4)
    ]
    acc1 = base
    for d in deltas:
        acc1 = apply_update(acc1, d)
    acc2 = base
    for d in reversed(deltas):
        acc2 = apply_update(acc2, d)
    assert acc1.equals(acc2)


def test_clamp():
    r = weighted([("A", STRING)], [(("a",), 1), (("b",), -1), (("c",), 3)])
    assert rowdict(clamp_nonneg(r)) == {("a",): 1, ("c",): 3}
    allpos = weighted([("A", STRING)], [(("a",), 2)])
    assert clamp_nonneg(allpos).equals(allpos)
    cancelled = diff(r, r)
    assert rowdict(clamp_nonneg(cancelled)) == {}
    g = rel([("A", STRING)], [("a",)], ring=GF2)
    with pytest.raises(RelationError):
        clamp_nonneg(g)


def test_clamp_rejects_baselines():
    x = rel(AB, X3)
    y = rel([("B", INT), ("C", STRING)], Y3)
    full = outer_join("full", x, y)
    with pytest.raises(RelationError):
        clamp_nonneg(full)


def test_ops_are_linear_in_each_argument(rng):
    def randrel():
        rows = [((rng.randint(0, 3), rng.choice("xyz")), rng.randint(-2, 2) or 1)
                for _ in range(rng.randint(0, 5))]
        return weighted([("A", INT), ("B", STRING)], rows)

    for _ in range(10):
        r, r2, s = randrel(), randrel(), randrel()
        lhs = union(union(r, r2), s)
        rhs = union(union(r, s), r2)
        assert lhs.equals(rhs)
        # selection is additive
        pred = Compare("<", "A", 2)
        assert select(union(r, r2), pred).equals(union(select(r, pred), select(r2, pred)))
        # projection is additive
        assert project(union(r, r2), ["B"]).equals(
            union(project(r, ["B"]), project(r2, ["B"]))
        )
        # the join is linear in each input (shared attribute A)
        s2 = relabel(s, ["A", "C"])
        assert natural_join([union(r, r2), s2]).equals(
            union(natural_join([r, s2]), natural_join([r2, s2]))
        )


def test_relabel():
    r = rel(AB, X3)
    out = relabel(r, ["X", "Y"])
    assert out.schema.names == ["X", "Y"]
    assert rowdict(out) == rowdict(r)
    with pytest.raises(RelationError):
        relabel(r, ["X"])


def test_union_of_product_and_loaded_relation():
    # differently parenthesised spaces reassociate transparently
    r = rel([("A", STRING)], [("a",)])
    s = rel([("B", INT)], [(1,)])
    prod = cartesian(r, s)
    flat = rel(AB, [("a", 1)])
    out = union(prod, flat)
    assert rowdict(out) == {("a", 1): 2}
