"""Primitive index sets for free modules and key-indexed collections.

A `PrimSet` describes the set of admissible keys at one collection level:
unit, booleans, 64-bit integers, strings, plus tagged sums and pairs of
these. Values of each set carry a total order (lexicographic for pairs,
left before right for sums) so canonical forms render deterministically.
`Adjoined` extends a base set with a single marker value, used for the
infinity element of min/max aggregation.

General function-space keys are deliberately unsupported; they do not
admit trie-shaped canonical forms.
"""

from dataclasses import dataclass

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


class PrimValueError(TypeError):
    pass


class _Marker:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label

    def __repr__(self):
        return self.label


#: adjoined top/bottom elements for aggregation results
INF = _Marker("inf")
NEG_INF = _Marker("-inf")


def left(v):
    return ("L", v)


def right(v):
    return ("R", v)


class PrimSet:
    def contains(self, v) -> bool:
        raise NotImplementedError

    def check(self, v):
        if not self.contains(v):
            raise PrimValueError(f"{v!r} is not a value of {self}")
        return v

    def sort_key(self, v):
        """Comparable key realising the set's total order."""
        raise NotImplementedError

    def render(self, v) -> str:
        raise NotImplementedError

    @property
    def finite(self) -> bool:
        return False

    def values(self):
        """All values, in order. Only for finite sets."""
        raise ValueError(f"{self} is not a finite set")


@dataclass(frozen=True)
class Unit(PrimSet):
    def contains(self, v):
        return v == ()

    def sort_key(self, v):
        return ()

    def render(self, v):
        return "()"

    @property
    def finite(self):
        return True

    def values(self):
        return [()]

    def __str__(self):
        return "Unit"


@dataclass(frozen=True)
class Bool(PrimSet):
    def contains(self, v):
        return isinstance(v, bool)

    def sort_key(self, v):
        return v

    def render(self, v):
        return "true" if v else "false"

    @property
    def finite(self):
        return True

    def values(self):
        return [False, True]

    def __str__(self):
        return "Bool"


@dataclass(frozen=True)
class Int64(PrimSet):
    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and INT64_MIN <= v <= INT64_MAX

    def sort_key(self, v):
        return v

    def render(self, v):
        return str(v)

    def __str__(self):
        return "Int64"


@dataclass(frozen=True)
class Str(PrimSet):
    def contains(self, v):
        return isinstance(v, str)

    def sort_key(self, v):
        return v

    def render(self, v):
        return v

    def __str__(self):
        return "Str"


@dataclass(frozen=True)
class Sum(PrimSet):
    lhs: PrimSet
    rhs: PrimSet

    def contains(self, v):
        if not (isinstance(v, tuple) and len(v) == 2):
            return False
        tag, x = v
        if tag == "L":
            return self.lhs.contains(x)
        if tag == "R":
            return self.rhs.contains(x)
        return False

    def sort_key(self, v):
        tag, x = v
        if tag == "L":
            return (0, self.lhs.sort_key(x))
        return (1, self.rhs.sort_key(x))

    def render(self, v):
        tag, x = v
        side = self.lhs if tag == "L" else self.rhs
        word = "left" if tag == "L" else "right"
        return f"{word}({side.render(x)})"

    @property
    def finite(self):
        return self.lhs.finite and self.rhs.finite

    def values(self):
        return [left(x) for x in self.lhs.values()] + [right(x) for x in self.rhs.values()]

    def __str__(self):
        return f"({self.lhs} + {self.rhs})"


@dataclass(frozen=True)
class Prod(PrimSet):
    fst: PrimSet
    snd: PrimSet

    def contains(self, v):
        return (
            isinstance(v, tuple)
            and len(v) == 2
            and self.fst.contains(v[0])
            and self.snd.contains(v[1])
        )

    def sort_key(self, v):
        return (self.fst.sort_key(v[0]), self.snd.sort_key(v[1]))

    def render(self, v):
        return f"({self.fst.render(v[0])}, {self.snd.render(v[1])})"

    @property
    def finite(self):
        return self.fst.finite and self.snd.finite

    def values(self):
        return [(a, b) for a in self.fst.values() for b in self.snd.values()]

    def __str__(self):
        return f"({self.fst} × {self.snd})"


@dataclass(frozen=True)
class Adjoined(PrimSet):
    """A base set plus one marker value, ordered first or last."""

    base: PrimSet
    marker: _Marker
    marker_first: bool

    def contains(self, v):
        return v is self.marker or self.base.contains(v)

    def sort_key(self, v):
        if v is self.marker:
            return (0 if self.marker_first else 1, ())
        return (1 if self.marker_first else 0, self.base.sort_key(v))

    def render(self, v):
        if v is self.marker:
            return self.marker.label
        return self.base.render(v)

    @property
    def finite(self):
        return self.base.finite

    def values(self):
        vs = list(self.base.values())
        return [self.marker] + vs if self.marker_first else vs + [self.marker]

    def __str__(self):
        return f"({self.base} ∪ {{{self.marker.label}}})"


UNIT = Unit()
BOOL = Bool()
INT = Int64()
STRING = Str()

#: integers with a greatest element, the codomain of min over possibly empty sets
INT_WITH_INF = Adjoined(INT, INF, marker_first=False)
#: integers with a least element, the codomain of max over possibly empty sets
INT_WITH_NEG_INF = Adjoined(INT, NEG_INF, marker_first=True)
