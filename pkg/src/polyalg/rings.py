"""Coefficient rings for weighted collections.

Multiplicities live in a commutative ring: signed integers give polysets,
the two-element field gives ordinary sets, floats give fuzzy sets with
real-valued membership. Ring elements are plain Python values; the ring
object supplies the operations, so mixing rings is a type error at
construction time rather than something checked per operation.
"""

REAL_DEFAULT_TOLERANCE = 1e-9


class Ring:
    """Commutative ring interface over opaque element values."""

    name = "?"
    zero = None
    one = None

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a):
        raise NotImplementedError

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def contains(self, a) -> bool:
        raise NotImplementedError

    def coerce(self, a):
        """Best-effort conversion into this ring, for loaders and CLI input."""
        if self.contains(a):
            return a
        raise TypeError(f"{a!r} is not a {self.name} ring element")

    def parse(self, text: str):
        raise NotImplementedError

    def render(self, a) -> str:
        raise NotImplementedError

    def sort_key(self, a):
        return a

    def sum(self, xs):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def __repr__(self):
        return self.name


class IntegerRing(Ring):
    """Arbitrary-precision signed integers.

    Multiplicities multiply under intersection and can exceed 64 bits on
    adversarial inputs; exactness here is what keeps cancellation (and hence
    zero detection) sound.
    """

    name = "z"
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool)

    def coerce(self, a):
        if isinstance(a, bool):
            raise TypeError("booleans are not integer multiplicities")
        if isinstance(a, int):
            return a
        raise TypeError(f"{a!r} is not an integer multiplicity")

    def parse(self, text):
        return int(text)

    def render(self, a):
        return str(a)


class GF2Ring(Ring):
    """The two-element field: xor and conjunction on booleans."""

    name = "gf2"
    zero = False
    one = True

    def add(self, a, b):
        return a != b

    def neg(self, a):
        return a

    def mul(self, a, b):
        return a and b

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def contains(self, a):
        return isinstance(a, bool)

    def coerce(self, a):
        if isinstance(a, bool):
            return a
        if a in (0, 1):
            return bool(a)
        raise TypeError(f"{a!r} is not a GF(2) multiplicity")

    def parse(self, text):
        t = text.strip().lower()
        if t in ("1", "true"):
            return True
        if t in ("0", "false"):
            return False
        raise ValueError(f"bad GF(2) value {text!r}")

    def render(self, a):
        return "1" if a else "0"


class RealRing(Ring):
    """64-bit floats with an absolute tolerance for zero tests.

    Pruning almost-zero coefficients keeps normal forms of fuzzy sets small;
    a relative tolerance may behave better for very large weights, which is
    left to the caller via the `tolerance` argument.
    """

    name = "real"
    zero = 0.0
    one = 1.0

    def __init__(self, tolerance: float = REAL_DEFAULT_TOLERANCE):
        self.tolerance = tolerance

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return abs(a) <= self.tolerance

    def eq(self, a, b):
        return abs(a - b) <= self.tolerance

    def contains(self, a):
        return isinstance(a, float)

    def coerce(self, a):
        if isinstance(a, bool):
            raise TypeError("booleans are not real multiplicities")
        if isinstance(a, (int, float)):
            return float(a)
        raise TypeError(f"{a!r} is not a real multiplicity")

    def parse(self, text):
        return float(text)

    def render(self, a):
        # repr of a float is the shortest decimal that round-trips
        return repr(a)


Z = IntegerRing()
GF2 = GF2Ring()
REAL = RealRing()

BY_NAME = {"z": Z, "gf2": GF2, "real": REAL}


def ring_by_name(name: str) -> Ring:
    try:
        return BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown ring {name!r}; expected one of {sorted(BY_NAME)}") from None
