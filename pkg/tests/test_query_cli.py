"""S-expression queries, CSV ingestion, the command line, and output formats."""

import json
import subprocess
import sys

import pytest

from polyalg import GF2, Z, QueryError, parse_sexpr, run
from polyalg.catalog import Catalog, CatalogError, load_csv, parse_schema
from polyalg.cli import main, render_relation
from polyalg.relational import relation_from_rows

X_CSV = "A,B\na,1\nb,2\nc,3\n"
Y_CSV = "B,C\n2,p\n3,q\n4,r\n"


@pytest.fixture
def cat(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    (tmp_path / "y.csv").write_text(Y_CSV)
    c = Catalog.open(tmp_path / "cat.json")
    c.add_csv("x", tmp_path / "x.csv", "A:str,B:int", "z")
    c.add_csv("y", tmp_path / "y.csv", "B:int,C:str", "z")
    return c


def rows(r):
    return dict(r.rows())


# --- parsing ---------------------------------------------------------------------

def test_parse_atoms_and_nesting():
    node = parse_sexpr('(select (= A "foo") (union x y))')
    assert node[0].name == "select"
    assert node[1][1].name == "A"
    assert node[1][2] == "foo"


def test_parse_errors_carry_positions():
    with pytest.raises(QueryError) as e:
        parse_sexpr("(union x")
    assert "offset" in str(e.value)
    with pytest.raises(QueryError):
        parse_sexpr("(union x y) extra")
    with pytest.raises(QueryError):
        parse_sexpr('"unterminated')


def test_query_evaluation(cat):
    out = run("(join x y)", cat)
    assert rows(out) == {("b", 2, "p"): 1, ("c", 3, "q"): 1}
    out = run("(union x x)", cat)
    assert set(rows(out).values()) == {2}
    out = run('(select (>= B 2) x)', cat)
    assert rows(out) == {("b", 2): 1, ("c", 3): 1}
    out = run("(project [A] x)", cat)
    assert rows(out) == {("a",): 1, ("b",): 1, ("c",): 1}
    out = run("(agg min [A] B x)", cat)
    assert [k for k, _ in out.rows()] == [("a", 1), ("b", 2), ("c", 3)]
    out = run("(map upper A (project [A] x))", cat)
    assert rows(out) == {("A",): 1, ("B",): 1, ("C",): 1}
    out = run("(rename [D] (project [A] x))", cat)
    assert out.schema.names == ["D"]
    out = run("(diff x x)", cat)
    assert rows(out) == {}
    out = run("(outer left x y)", cat)
    assert out.has_baseline()


def test_query_type_errors_name_the_attribute(cat):
    with pytest.raises(QueryError) as e:
        run("(select (= Z 1) x)", cat)
    assert "Z" in str(e.value)
    with pytest.raises(QueryError) as e:
        run('(select (= B "two") x)', cat)
    assert "B" in str(e.value)
    with pytest.raises(QueryError) as e:
        run("(join x unknown)", cat)
    assert "unknown" in str(e.value)
    with pytest.raises(QueryError):
        run("(frobnicate x)", cat)


# --- CSV -------------------------------------------------------------------------

def test_csv_duplicates_accumulate(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("A,B\na,1\na,1\nb,2\n")
    r = load_csv(p, parse_schema("A:str,B:int"), Z)
    assert rows(r) == {("a", 1): 2, ("b", 2): 1}


def test_csv_weight_column_makes_deltas(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("A,#weight\na,1\nb,-1\n")
    r = load_csv(p, parse_schema("A:str"), Z)
    assert rows(r) == {("a",): 1, ("b",): -1}
    db = relation_from_rows(r.schema, Z, [(("b",), 1), (("c",), 1)])
    from polyalg import apply_update

    assert rows(apply_update(db, r)) == {("a",): 1, ("c",): 1}


def test_csv_diagnostics(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("A,B\na,notanint\n")
    with pytest.raises(CatalogError) as e:
        load_csv(p, parse_schema("A:str,B:int"), Z)
    assert ":2:" in str(e.value)
    p2 = tmp_path / "head.csv"
    p2.write_text("X,Y\na,1\n")
    with pytest.raises(CatalogError):
        load_csv(p2, parse_schema("A:str,B:int"), Z)
    with pytest.raises(CatalogError):
        parse_schema("A:float")


def test_csv_round_trip(cat, tmp_path):
    r = cat.get("x")
    text = render_relation(r, "csv")
    p = tmp_path / "round.csv"
    p.write_text(text + "\n")
    again = load_csv(p, parse_schema("A:str,B:int"), Z)
    assert again.equals(r)


def test_csv_quoting_round_trip(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text('A,B\n"a,b",1\n"say ""hi""",2\néè,3\n')
    r = load_csv(p, parse_schema("A:str,B:int"), Z)
    assert rows(r) == {("a,b", 1): 1, ('say "hi"', 2): 1, ("éè", 3): 1}
    text = render_relation(r, "csv")
    p2 = tmp_path / "q2.csv"
    p2.write_text(text + "\n")
    assert load_csv(p2, parse_schema("A:str,B:int"), Z).equals(r)


def test_gf2_ring_load(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("A\na\na\nb\n")
    r = load_csv(p, parse_schema("A:str"), GF2)
    assert rows(r) == {("b",): True}  # the two a's cancel mod 2


# --- CLI -------------------------------------------------------------------------

def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "polyalg.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_cli_end_to_end(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    (tmp_path / "y.csv").write_text(Y_CSV)
    r = run_cli(["load", "x.csv", "--as", "x", "--schema", "A:str,B:int"], tmp_path)
    assert r.returncode == 0, r.stderr
    r = run_cli(["load", "y.csv", "--as", "y", "--schema", "B:int,C:str"], tmp_path)
    assert r.returncode == 0
    q = run_cli(["query", "(join x y)"], tmp_path)
    assert q.returncode == 0
    assert "b  2  p  1" in q.stdout
    assert "c  3  q  1" in q.stdout
    stats = run_cli(["query", "(join x y)", "--stats"], tmp_path)
    assert "trie_edges" in stats.stdout
    shown = run_cli(["show", "x", "--format", "csv"], tmp_path)
    assert shown.stdout.splitlines()[0] == "A,B,#weight"


def test_cli_json_schema(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    run_cli(["load", "x.csv", "--as", "x", "--schema", "A:str,B:int"], tmp_path)
    out = run_cli(["query", "(union x x)", "--format", "json"], tmp_path)
    payload = json.loads(out.stdout)
    assert payload["ring"] == "z"
    assert payload["has_baseline"] is False
    assert payload["schema"] == [
        {"name": "A", "type": "str"},
        {"name": "B", "type": "int"},
    ]
    assert {"key": ["a", "1"], "coeff": "2"} in payload["rows"]


def test_cli_baseline_flagging(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    (tmp_path / "y.csv").write_text(Y_CSV)
    run_cli(["load", "x.csv", "--as", "x", "--schema", "A:str,B:int"], tmp_path)
    run_cli(["load", "y.csv", "--as", "y", "--schema", "B:int,C:str"], tmp_path)
    out = run_cli(["query", "(outer full x y)", "--format", "json"], tmp_path)
    payload = json.loads(out.stdout)
    assert payload["has_baseline"] is True
    assert {"key": ["*", "4", "r"], "coeff": "1"} in payload["rows"]
    table = run_cli(["query", "(outer full x y)"], tmp_path)
    assert "wildcard baselines" in table.stdout


def test_cli_determinism(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    (tmp_path / "y.csv").write_text(Y_CSV)
    run_cli(["load", "x.csv", "--as", "x", "--schema", "A:str,B:int"], tmp_path)
    run_cli(["load", "y.csv", "--as", "y", "--schema", "B:int,C:str"], tmp_path)
    a = run_cli(["query", "(outer full x y)", "--format", "json"], tmp_path)
    b = run_cli(["query", "(outer full x y)", "--format", "json"], tmp_path)
    assert a.stdout == b.stdout


def test_cli_exit_codes(tmp_path):
    (tmp_path / "x.csv").write_text(X_CSV)
    usage = run_cli(["query"], tmp_path)  # missing argument
    assert usage.returncode == 1
    unknown = run_cli(["nonsense"], tmp_path)
    assert unknown.returncode == 1
    run_cli(["load", "x.csv", "--as", "x", "--schema", "A:str,B:int"], tmp_path)
    data_err = run_cli(["query", "(select (= Q 1) x)"], tmp_path)
    assert data_err.returncode == 2
    assert "Q" in data_err.stderr
    bad_load = run_cli(
        ["load", "x.csv", "--as", "x2", "--schema", "A:int,B:int"], tmp_path
    )
    assert bad_load.returncode == 2


def test_cli_bench_small(tmp_path):
    out = run_cli(
        ["bench", "triangle", "--sizes", "2,3", "--repeats", "1", "--with-naive"],
        tmp_path,
    )
    assert out.returncode == 0, out.stderr
    assert "slope" in out.stdout
    # correctness gate rows: 8 and 27
    assert " 8 " in out.stdout and " 27 " in out.stdout


def test_in_process_main(tmp_path, capsys):
    (tmp_path / "x.csv").write_text(X_CSV)
    code = main(
        [
            "--catalog",
            str(tmp_path / "c.json"),
            "load",
            str(tmp_path / "x.csv"),
            "--as",
            "x",
            "--schema",
            "A:str,B:int",
        ]
    )
    assert code == 0
    code = main(["--catalog", str(tmp_path / "c.json"), "show", "x"])
    assert code == 0
    out = capsys.readouterr().out
    assert "loaded x" in out and "(3 rows)" in out
