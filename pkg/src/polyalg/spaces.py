"""Space descriptors: which module a symbolic term inhabits.

Seven constructions, all over a fixed coefficient ring: the scalar module,
free and compact free modules over a primitive index set, biproducts,
finite and compact maps, and tensor products. Every construction here is a
weighted algebra, so multiplication and the weight map are total across
spaces. The ring is carried on every descriptor and must agree between the
parts of a composite space.
"""

from dataclasses import dataclass

from .prims import PrimSet
from .rings import Ring


class SpaceError(TypeError):
    pass


class Space:
    ring: Ring

    def _check_ring(self, *parts):
        for p in parts:
            if p.ring is not self.ring:
                raise SpaceError(f"mixed rings in {self}: {p.ring} vs {self.ring}")


@dataclass(frozen=True)
class Scalar(Space):
    ring: Ring

    def __str__(self):
        return "K"


@dataclass(frozen=True)
class Free(Space):
    ring: Ring
    prim: PrimSet

    def __str__(self):
        return f"F[{self.prim}]"


@dataclass(frozen=True)
class CompactFree(Space):
    ring: Ring
    prim: PrimSet

    def __str__(self):
        return f"F*[{self.prim}]"


@dataclass(frozen=True)
class Biproduct(Space):
    lhs: Space
    rhs: Space

    def __post_init__(self):
        self._check_ring(self.lhs, self.rhs)

    @property
    def ring(self):
        return self.lhs.ring

    def __str__(self):
        return f"({self.lhs} ⊕ {self.rhs})"


@dataclass(frozen=True)
class FinMap(Space):
    ring: Ring
    prim: PrimSet
    value: Space

    def __post_init__(self):
        self._check_ring(self.value)

    def __str__(self):
        return f"({self.prim} ⇒ {self.value})"


@dataclass(frozen=True)
class CompactMap(Space):
    ring: Ring
    prim: PrimSet
    value: Space

    def __post_init__(self):
        self._check_ring(self.value)

    def __str__(self):
        return f"({self.prim} ⇒* {self.value})"


@dataclass(frozen=True)
class Tensor(Space):
    lhs: Space
    rhs: Space

    def __post_init__(self):
        self._check_ring(self.lhs, self.rhs)

    @property
    def ring(self):
        return self.lhs.ring

    def __str__(self):
        return f"({self.lhs} ⊗ {self.rhs})"


def is_compact(space: Space) -> bool:
    return isinstance(space, (CompactFree, CompactMap))


def tensor_chain(ring: Ring, prims, compact: bool = False) -> Space:
    """Right-nested chain of free factors, one per attribute.

    A single attribute is just the free module itself, no tensor wrapper.
    """
    prims = list(prims)
    if not prims:
        raise SpaceError("a tensor chain needs at least one factor")
    mk = (lambda p: CompactFree(ring, p)) if compact else (lambda p: Free(ring, p))
    space = mk(prims[-1])
    for p in reversed(prims[:-1]):
        space = Tensor(mk(p), space)
    return space


def chain_prims(space: Space):
    """Factor prims of a right-nested free chain, or None if not chain-shaped."""
    out = []
    s = space
    while isinstance(s, Tensor):
        if not isinstance(s.lhs, (Free, CompactFree)):
            return None
        out.append(s.lhs.prim)
        s = s.rhs
    if not isinstance(s, (Free, CompactFree)):
        return None
    out.append(s.prim)
    return out
