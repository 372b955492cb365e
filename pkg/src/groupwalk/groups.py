"""Finite group tables with dense 0-based element indexing.

Three constructors cover everything downstream: cyclic groups, Heisenberg
groups mod m (upper-triangular 3x3 matrices over Z_m) and direct products.
Group operations accept ints or numpy integer arrays and never materialize
an |G| x |G| multiplication table; products are computed from coordinates
on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityExceededError, InvalidParameterError, NotGeneratingError

DEFAULT_ENUMERATION_CAP = 50_000


class GroupTable:
    """A fully enumerated finite group on indices 0..order-1."""

    order: int
    id_index: int = 0
    label: str = "?"

    def op(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def elements(self) -> range:
        return range(self.order)

    # number of integer coordinates in the flat element encoding
    coord_width: int = 1

    def index_from_coords(self, coords):
        raise NotImplementedError

    def coords_from_index(self, a):
        raise NotImplementedError

    def element_label(self, a: int) -> str:
        coords = self.coords_from_index(a)
        return ".".join(str(int(c)) for c in np.atleast_1d(np.asarray(coords)).ravel()) \
            if self.coord_width > 1 else str(int(a))

    def __repr__(self) -> str:
        return f"<GroupTable {self.label} order={self.order}>"


class CyclicTable(GroupTable):
    """Z_n under addition mod n."""

    def __init__(self, n: int):
        self.n = n
        self.order = n
        self.label = f"Z:{n}"

    def op(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.n if _vec(a, b) else (a + b) % self.n

    def inv(self, a):
        return (-np.asarray(a)) % self.n if _vec(a) else (-a) % self.n

    def index_from_coords(self, coords):
        (c,) = coords
        return int(c) % self.n

    def coords_from_index(self, a):
        return (int(a),)


class HeisenbergTable(GroupTable):
    """Triples (i,j,k) over Z_m with (i,j,k)(i',j',k') = (i+i', j+j', k+k'+i*j').

    Elements are indexed by the row-major lexicographic rank of (i,j,k).
    """

    def __init__(self, m: int):
        self.m = m
        self.order = m ** 3
        self.label = f"H:{m}"
        self.coord_width = 3

    def _dec(self, a):
        a = np.asarray(a)
        m = self.m
        return a // (m * m), (a // m) % m, a % m

    def _enc(self, i, j, k):
        return (i * self.m + j) * self.m + k

    def op(self, a, b):
        m = self.m
        i1, j1, k1 = self._dec(a)
        i2, j2, k2 = self._dec(b)
        out = self._enc((i1 + i2) % m, (j1 + j2) % m, (k1 + k2 + i1 * j2) % m)
        return out if _vec(a, b) else int(out)

    def inv(self, a):
        m = self.m
        i, j, k = self._dec(a)
        out = self._enc((-i) % m, (-j) % m, (i * j - k) % m)
        return out if _vec(a) else int(out)

    def index_from_coords(self, coords):
        i, j, k = (int(c) % self.m for c in coords)
        return int(self._enc(i, j, k))

    def coords_from_index(self, a):
        i, j, k = self._dec(int(a))
        return (int(i), int(j), int(k))


class ProductTable(GroupTable):
    """Direct product with componentwise operation and mixed-radix indexing.

    The last factor varies fastest, so index = ((c_1*|G_2| + c_2)*|G_3| + ...).
    """

    def __init__(self, factors: list[GroupTable]):
        self.factors = list(factors)
        order = 1
        for f in self.factors:
            order *= f.order
        self.order = order
        self.label = "P:" + ",".join(_wrap(f.label) for f in self.factors)
        self.coord_width = sum(f.coord_width for f in self.factors)

    def split(self, a):
        """Decompose flat indices into per-factor indices."""
        a = np.asarray(a)
        parts = []
        for f in reversed(self.factors):
            parts.append(a % f.order)
            a = a // f.order
        return list(reversed(parts))

    def join(self, parts):
        a = np.zeros_like(np.asarray(parts[0]))
        for f, c in zip(self.factors, parts):
            a = a * f.order + np.asarray(c)
        return a

    def op(self, a, b):
        ca, cb = self.split(a), self.split(b)
        out = self.join([f.op(x, y) for f, x, y in zip(self.factors, ca, cb)])
        return out if _vec(a, b) else int(out)

    def inv(self, a):
        out = self.join([f.inv(x) for f, x in zip(self.factors, self.split(a))])
        return out if _vec(a) else int(out)

    def index_from_coords(self, coords):
        coords = list(coords)
        parts = []
        pos = 0
        for f in self.factors:
            parts.append(f.index_from_coords(coords[pos:pos + f.coord_width]))
            pos += f.coord_width
        return int(self.join(parts))

    def coords_from_index(self, a):
        out = []
        for f, c in zip(self.factors, self.split(int(a))):
            out.extend(f.coords_from_index(int(c)))
        return tuple(out)


def _vec(*args) -> bool:
    return any(isinstance(x, np.ndarray) for x in args)


def _wrap(label: str) -> str:
    return f"({label})" if label.startswith("P:") else label


def make_cyclic(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> CyclicTable:
    """Z_n; the identity has index 0 and inv(x) = n - x mod n."""
    if n < 1:
        raise InvalidParameterError(f"cyclic group needs n >= 1, got {n}")
    if n > cap:
        raise CapacityExceededError(f"order {n} exceeds enumeration cap {cap}")
    return CyclicTable(n)


def make_heisenberg(m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> HeisenbergTable:
    """Heisenberg group mod m (order m^3), m >= 2."""
    if m < 2:
        raise InvalidParameterError(f"Heisenberg modulus must be >= 2, got {m}")
    if m ** 3 > cap:
        raise CapacityExceededError(f"order {m ** 3} exceeds enumeration cap {cap}")
    return HeisenbergTable(m)


def make_product(factors: list[GroupTable], cap: int = DEFAULT_ENUMERATION_CAP) -> GroupTable:
    """Direct product of the given tables; a singleton list returns the factor itself."""
    if not factors:
        raise InvalidParameterError("product needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    order = 1
    for f in factors:
        order *= f.order
        if order > cap:
            raise CapacityExceededError(f"product order exceeds enumeration cap {cap}")
    return ProductTable(factors)


@dataclass(frozen=True)
class GeneratorSet:
    """Set of generator indices; ``symmetric`` asserts closure under inversion."""

    members: tuple[int, ...]
    symmetric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))


def generator_set(group: GroupTable, members, symmetric: bool = True) -> GeneratorSet:
    """Validate and build a GeneratorSet for ``group``.

    Checks membership range, the symmetry flag and that the members generate
    the whole group (BFS closure over right multiplication).
    """
    e = GeneratorSet(tuple(members), symmetric=symmetric)
    if not e.members:
        raise InvalidParameterError("generator set is empty")
    for x in e.members:
        if not 0 <= x < group.order:
            raise InvalidParameterError(f"generator index {x} out of range for {group.label}")
    if symmetric:
        for x in e.members:
            if int(group.inv(x)) not in e.members:
                raise InvalidParameterError(
                    f"set flagged symmetric but inverse of {x} is missing")
    if closure_size(group, e.members) != group.order:
        raise NotGeneratingError(f"members {e.members} do not generate {group.label}")
    return e


def closure_size(group: GroupTable, members) -> int:
    """Size of the subgroup generated by ``members`` (BFS closure)."""
    seen = np.zeros(group.order, dtype=bool)
    seen[group.id_index] = True
    frontier = np.array([group.id_index], dtype=np.int64)
    gens = np.asarray(sorted(set(int(m) for m in members)), dtype=np.int64)
    count = 1
    while frontier.size:
        nxt = np.unique(np.concatenate([group.op(frontier, g) for g in gens]))
        fresh = nxt[~seen[nxt]]
        seen[fresh] = True
        count += fresh.size
        frontier = fresh
    return count


def canonical_generators(group: GroupTable) -> GeneratorSet:
    """The default symmetric generating set used throughout.

    Cyclic: {0, 1, -1}. Heisenberg: identity plus the four elementary shifts
    in the i and j coordinates. Product: union of the lifted factor sets.
    """
    if isinstance(group, CyclicTable):
        n = group.n
        members = {0} if n == 1 else {0, 1 % n, (n - 1) % n}
        return GeneratorSet(tuple(members))
    if isinstance(group, HeisenbergTable):
        m = group.m
        members = [
            group.index_from_coords((0, 0, 0)),
            group.index_from_coords((1, 0, 0)),
            group.index_from_coords((m - 1, 0, 0)),
            group.index_from_coords((0, 1, 0)),
            group.index_from_coords((0, m - 1, 0)),
        ]
        return GeneratorSet(tuple(set(members)))
    if isinstance(group, ProductTable):
        members = {group.id_index}
        for pos, f in enumerate(group.factors):
            for g in canonical_generators(f).members:
                parts = [fac.id_index for fac in group.factors]
                parts[pos] = g
                members.add(int(group.join(parts)))
        return GeneratorSet(tuple(members))
    raise InvalidParameterError(f"no canonical generators for {group!r}")


def lift_to_product(product: ProductTable, pos: int, index: int) -> int:
    """Embed a factor element at coordinate ``pos``, identity elsewhere."""
    parts = [f.id_index for f in product.factors]
    parts[pos] = index
    return int(product.join(parts))


def parse_group(desc: str, cap: int = DEFAULT_ENUMERATION_CAP) -> GroupTable:
    """Parse "Z:<n>", "H:<m>" or "P:<desc>,<desc>,..." (parenthesize nested P)."""
    desc = desc.strip()
    if desc.startswith("(") and desc.endswith(")"):
        return parse_group(desc[1:-1], cap)
    if desc.startswith("Z:"):
        return make_cyclic(_parse_int(desc[2:], desc), cap)
    if desc.startswith("H:"):
        return make_heisenberg(_parse_int(desc[2:], desc), cap)
    if desc.startswith("P:"):
        parts = _split_top(desc[2:])
        if not parts:
            raise InvalidParameterError(f"empty product descriptor: {desc!r}")
        return make_product([parse_group(p, cap) for p in parts], cap)
    raise InvalidParameterError(f"unknown group descriptor: {desc!r}")


def _parse_int(text: str, desc: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidParameterError(f"bad integer in descriptor {desc!r}") from None


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise InvalidParameterError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise InvalidParameterError(f"unbalanced parentheses in {text!r}")
    if cur:
        parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p]


def parse_elements(group: GroupTable, text: str) -> list[int]:
    """Parse a comma-separated element list.

    Each element is given by its flat coordinates joined with ".": a plain
    integer for cyclic groups, "i.j.k" for Heisenberg, and the concatenation
    of factor coordinates for products. Negative coordinates are reduced mod
    the relevant modulus.
    """
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        coords = [int(c) for c in chunk.split(".")]
        if len(coords) != group.coord_width:
            raise InvalidParameterError(
                f"element {chunk!r} has {len(coords)} coordinates, "
                f"{group.label} needs {group.coord_width}")
        out.append(group.index_from_coords(coords))
    if not out:
        raise InvalidParameterError("empty element list")
    return out
