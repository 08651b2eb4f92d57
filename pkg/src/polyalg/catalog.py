"""CSV ingestion and the named-relation catalog.

A catalog maps names to relations. For the command line it persists as a
small JSON manifest pointing at the source CSV files with their declared
schemas and ring, so separate invocations share names without any storage
engine; files are re-read on use.

CSV format: RFC-4180 with a header row matching the declared schema.
Integer cells are 64-bit decimals, booleans are true/false, strings are
UTF-8. Duplicate rows accumulate multiplicity; an optional trailing
`#weight` column supplies explicit coefficients (negative weights make
deletion deltas).
"""

import csv
import json
from pathlib import Path

from .prims import BOOL, INT, STRING
from .relational import Relation, Schema, relation_from_rows
from .rings import Ring, ring_by_name

WEIGHT_COLUMN = "#weight"

_CSV_TYPES = {"int": INT, "str": STRING, "bool": BOOL}


class CatalogError(ValueError):
    pass


def parse_schema(text: str) -> Schema:
    """Parse `A:str,B:int` into a schema."""
    cols = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise CatalogError(f"bad schema column {part!r}; expected name:type")
        name, tname = (x.strip() for x in part.split(":", 1))
        prim = _CSV_TYPES.get(tname)
        if prim is None:
            raise CatalogError(f"unknown type {tname!r}; expected one of {sorted(_CSV_TYPES)}")
        cols.append((name, prim))
    if not cols:
        raise CatalogError("empty schema")
    return Schema(tuple(cols))


def _parse_cell(text: str, prim, where: str):
    if prim is INT:
        try:
            v = int(text)
        except ValueError:
            raise CatalogError(f"{where}: {text!r} is not an integer") from None
        if not INT.contains(v):
            raise CatalogError(f"{where}: {text!r} is out of 64-bit range")
        return v
    if prim is BOOL:
        t = text.strip().lower()
        if t == "true":
            return True
        if t == "false":
            return False
        raise CatalogError(f"{where}: {text!r} is not true/false")
    return text


def load_csv(path, sch: Schema, ring: Ring) -> Relation:
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise CatalogError(f"cannot read {path}: {e}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CatalogError(f"{path}: missing header row") from None
        expected = list(sch.names)
        has_weight = False
        if header == expected + [WEIGHT_COLUMN]:
            has_weight = True
        elif header != expected:
            raise CatalogError(
                f"{path}: header {header} does not match schema columns {expected}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            want = len(sch) + (1 if has_weight else 0)
            if len(row) != want:
                raise CatalogError(f"{path}:{lineno}: expected {want} cells, got {len(row)}")
            tup = tuple(
                _parse_cell(cell, prim, f"{path}:{lineno}:{i + 1}")
                for i, (cell, prim) in enumerate(zip(row, sch.prims))
            )
            if has_weight:
                try:
                    coeff = ring.parse(row[-1])
                except ValueError as e:
                    raise CatalogError(f"{path}:{lineno}: bad weight: {e}") from None
            else:
                coeff = ring.one
            rows.append((tup, coeff))
    return relation_from_rows(sch, ring, rows)


class Catalog:
    """Named relations; optionally backed by a JSON manifest of CSV sources."""

    def __init__(self, manifest_path=None):
        self.manifest_path = Path(manifest_path) if manifest_path else None
        self.entries = {}  # name -> {"path", "schema", "ring"}
        self._cache = {}

    @classmethod
    def open(cls, manifest_path) -> "Catalog":
        cat = cls(manifest_path)
        p = cat.manifest_path
        if p is not None and p.exists():
            try:
                data = json.loads(p.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise CatalogError(f"cannot read catalog {p}: {e}") from None
            cat.entries = data.get("relations", {})
        return cat

    def save(self):
        if self.manifest_path is None:
            return
        payload = {"relations": self.entries}
        self.manifest_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def add_csv(self, name: str, path, schema_text: str, ring_name: str) -> Relation:
        sch = parse_schema(schema_text)
        ring = ring_by_name(ring_name)
        relation = load_csv(path, sch, ring)  # validate before recording
        self.entries[name] = {
            "path": str(Path(path).resolve()),
            "schema": schema_text,
            "ring": ring_name,
        }
        self._cache[name] = relation
        return relation

    def put(self, name: str, relation: Relation):
        self._cache[name] = relation

    def get(self, name: str):
        if name in self._cache:
            return self._cache[name]
        entry = self.entries.get(name)
        if entry is None:
            return None
        relation = load_csv(
            entry["path"], parse_schema(entry["schema"]), ring_by_name(entry["ring"])
        )
        self._cache[name] = relation
        return relation

    def names(self):
        return sorted(set(self.entries) | set(self._cache))
