"""Permutation groups by explicit closure, and finite groups as Cayley tables.

The engine is deliberately plain: groups are materialized as element lists by
breadth-first closure of the generators (bounded by a configurable limit,
QF_MAX_ELEMENTS in the environment overrides the default).  That is all the
structure analysis needs at the scales this package targets; a stabilizer
chain would fit behind the same interface if ever required.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import permutations as _itertools_permutations

import numpy as np

from .gf import gf
from .perms import Perm, commutator, compose, identity, inverse, orbit_partition

DEFAULT_ELEMENT_LIMIT = 10**6


def element_limit() -> int:
    return int(os.environ.get("QF_MAX_ELEMENTS", DEFAULT_ELEMENT_LIMIT))


class Overflow(RuntimeError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"group closure exceeded {limit} elements")


class DegreeMismatch(ValueError):
    pass


def closure(gens: list[Perm], limit: int | None = None) -> list[Perm]:
    """All products of the generators, in deterministic BFS order."""
    if limit is None:
        limit = element_limit()
    degrees = {len(g) for g in gens}
    if len(degrees) > 1:
        raise DegreeMismatch(f"generator degrees differ: {sorted(degrees)}")
    n = degrees.pop() if degrees else 0
    ident = identity(n)
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    if len(seen) >= limit:
                        raise Overflow(limit)
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    return elements


class PermGroup:
    """Group of permutations of 0..degree-1, given by generators.

    Immutable after construction; the element list is computed on first use
    and cached.
    """

    def __init__(self, degree: int, generators):
        self.degree = degree
        gens = []
        for g in generators:
            g = tuple(g)
            if len(g) != degree:
                raise DegreeMismatch(f"generator degree {len(g)} != {degree}")
            if g != identity(degree) and g not in gens:
                gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._elements: list[Perm] | None = None
        self._element_set: frozenset[Perm] | None = None

    def elements(self, limit: int | None = None) -> list[Perm]:
        if self._elements is None:
            self._elements = closure(list(self.generators) or [identity(self.degree)], limit)
            self._element_set = frozenset(self._elements)
        return self._elements

    def element_set(self) -> frozenset[Perm]:
        self.elements()
        assert self._element_set is not None
        return self._element_set

    def order(self) -> int:
        return len(self.elements())

    def __contains__(self, p: Perm) -> bool:
        return tuple(p) in self.element_set()

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, ngens={len(self.generators)})"

    def orbits(self) -> list[tuple[int, ...]]:
        return orbit_partition(self.degree, self.generators)

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(
            compose(a, b) == compose(b, a) for i, a in enumerate(gens) for b in gens[i:]
        )

    def stabilizer(self, point: int) -> "PermGroup":
        fixed = [g for g in self.elements() if g[point] == point]
        return PermGroup(self.degree, fixed)

    def center(self) -> "PermGroup":
        gens = self.generators
        central = [
            x for x in self.elements() if all(compose(x, g) == compose(g, x) for g in gens)
        ]
        return PermGroup(self.degree, central)

    def derived_subgroup(self) -> "PermGroup":
        gens = self.generators
        comms = [commutator(a, b) for a in gens for b in gens]
        return self.normal_closure(comms)

    def normal_closure(self, perms) -> "PermGroup":
        """Smallest subgroup containing perms and normal in this group."""
        gens = [tuple(p) for p in perms]
        while True:
            sub = closure(gens or [identity(self.degree)])
            sub_set = set(sub)
            new = []
            for g in self.generators:
                ginv = inverse(g)
                for s in gens:
                    c = compose(compose(g, s), ginv)
                    if c not in sub_set and c not in new:
                        new.append(c)
            if not new:
                return PermGroup(self.degree, gens)
            gens.extend(new)

    def is_subgroup(self, sub: "PermGroup") -> bool:
        es = self.element_set()
        return all(g in es for g in sub.generators)

    def is_normal(self, sub: "PermGroup") -> bool:
        sub_set = sub.element_set()
        for g in self.generators:
            ginv = inverse(g)
            for s in sub.generators:
                if compose(compose(g, s), ginv) not in sub_set:
                    return False
        return True

    def is_minimal_normal(self, sub: "PermGroup") -> bool:
        """sub is nontrivial, normal, and has no proper nontrivial subgroup
        normal in self.

        Checked via normal closures: minimality holds iff every nonidentity
        element of sub already generates all of sub as a normal subgroup.
        """
        if sub.order() == 1 or not self.is_normal(sub):
            return False
        ident = identity(self.degree)
        target = sub.order()
        for h in sub.elements():
            if h == ident:
                continue
            if self.normal_closure([h]).order() != target:
                return False
        return True


# ---------------------------------------------------------------------------
# finite groups as Cayley tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupTable:
    """Finite group on 0..n-1 with explicit table, identity and inverses."""

    table: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]


def group_from_table(rows) -> GroupTable:
    """Validate a raw Cayley table: associativity, identity, inverses."""
    table = tuple(tuple(int(v) for v in row) for row in rows)
    n = len(table)
    if any(len(row) != n for row in table):
        raise ValueError("table is not square")
    if any(not 0 <= v < n for row in table for v in row):
        raise ValueError("entry out of range")
    arr = np.asarray(table, dtype=np.int64)
    for a in range(n):
        # (a*b)*c == a*(b*c) for this a and all b, c
        if not np.array_equal(arr[arr[a]], arr[a][arr]):
            raise ValueError("not associative")
    ident = None
    for e in range(n):
        if all(table[e][b] == b for b in range(n)) and all(
            table[a][e] == a for a in range(n)
        ):
            ident = e
            break
    if ident is None:
        raise ValueError("no identity element")
    inv = []
    for a in range(n):
        try:
            inv.append(next(b for b in range(n) if table[a][b] == ident))
        except StopIteration:
            raise ValueError(f"element {a} has no inverse")
    return GroupTable(table, ident, tuple(inv))


def group_from_elements(elements, op) -> GroupTable:
    """Cayley table of a concrete group given its element list and product."""
    index = {e: i for i, e in enumerate(elements)}
    rows = [[index[op(a, b)] for b in elements] for a in elements]
    return group_from_table(rows)


@dataclass(frozen=True)
class GroupPredicates:
    uniquely_2_divisible: bool
    center_involution_free: bool
    two_nilpotent: bool
    bruck_identity: bool


def group_predicates(g: GroupTable) -> GroupPredicates:
    """The four structural tests driving the core-of-group equivalences."""
    n = g.n
    t = g.table
    squares = [t[a][a] for a in range(n)]
    u2d = len(set(squares)) == n

    center = [a for a in range(n) if all(t[a][b] == t[b][a] for b in range(n))]
    cif = not any(a != g.identity and t[a][a] == g.identity for a in center)

    # nilpotency class <= 2: the commutator subgroup sits inside the center
    center_set = set(center)
    comms = {
        t[t[t[a][b]][g.inverse[a]]][g.inverse[b]] for a in range(n) for b in range(n)
    }
    derived = _table_subgroup_closure(g, comms)
    two_nilpotent = derived <= center_set

    bruck = all(
        t[t[t[a][b]][b]][a] == t[t[t[b][a]][a]][b] for a in range(n) for b in range(n)
    )
    return GroupPredicates(u2d, cif, two_nilpotent, bruck)


def _table_subgroup_closure(g: GroupTable, seed) -> set[int]:
    current = set(seed) | {g.identity}
    frontier = list(current)
    while frontier:
        nxt = []
        for a in list(current):
            for b in frontier:
                c = g.table[a][b]
                if c not in current:
                    current.add(c)
                    nxt.append(c)
        frontier = nxt
    return current


# ---------------------------------------------------------------------------
# catalog constructions
# ---------------------------------------------------------------------------

def cyclic_group(n: int) -> GroupTable:
    return group_from_table([[(a + b) % n for b in range(n)] for a in range(n)])


def abelian_group(factors: list[int]) -> GroupTable:
    """Direct product of cyclic groups of the given orders."""
    if not factors:
        return cyclic_group(1)
    sizes = list(factors)

    def decode(i: int) -> list[int]:
        out = []
        for m in reversed(sizes):
            out.append(i % m)
            i //= m
        return out[::-1]

    def encode(v) -> int:
        i = 0
        for m, x in zip(sizes, v):
            i = i * m + x
        return i

    n = 1
    for m in sizes:
        n *= m
    rows = [
        [encode([(x + y) % m for m, x, y in zip(sizes, decode(a), decode(b))]) for b in range(n)]
        for a in range(n)
    ]
    return group_from_table(rows)


def dihedral_group(n: int) -> GroupTable:
    """Symmetries of the regular n-gon, order 2n; index i<n rotations, n+i flips."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def op(a: int, b: int) -> int:
        ra, fa = a % n, a >= n
        rb, fb = b % n, b >= n
        if not fa:
            r = (ra + rb) % n
        else:
            r = (ra - rb) % n
        return r + n * (fa != fb)

    return group_from_table([[op(a, b) for b in range(2 * n)] for a in range(2 * n)])


def quaternion_group() -> GroupTable:
    """The eight quaternion units; elements (s, u) = (-1)^s * u."""
    units = ["1", "i", "j", "k"]
    mul = {
        ("1", "1"): (0, "1"), ("1", "i"): (0, "i"), ("1", "j"): (0, "j"), ("1", "k"): (0, "k"),
        ("i", "1"): (0, "i"), ("i", "i"): (1, "1"), ("i", "j"): (0, "k"), ("i", "k"): (1, "j"),
        ("j", "1"): (0, "j"), ("j", "i"): (1, "k"), ("j", "j"): (1, "1"), ("j", "k"): (0, "i"),
        ("k", "1"): (0, "k"), ("k", "i"): (0, "j"), ("k", "j"): (1, "i"), ("k", "k"): (1, "1"),
    }
    elements = [(s, u) for s in (0, 1) for u in units]

    def op(a, b):
        s, u = mul[(a[1], b[1])]
        return ((a[0] + b[0] + s) % 2, u)

    return group_from_elements(elements, op)


def symmetric_group(degree: int) -> GroupTable:
    elements = sorted(_itertools_permutations(range(degree)))
    return group_from_elements(elements, compose)


def alternating_group(degree: int) -> GroupTable:
    elements = sorted(p for p in _itertools_permutations(range(degree)) if _is_even(p))
    return group_from_elements(elements, compose)


def _is_even(p) -> bool:
    seen = [False] * len(p)
    parity = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity == 0


def sl2(q: int) -> GroupTable:
    """SL2 over the field of order q (q in {2, 3, 4, 5, 7, 9})."""
    f = gf(q)
    elements = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    det = f.sub(f.mul[a][d], f.mul[b][c])
                    if det == 1:
                        elements.append((a, b, c, d))

    def op(m1, m2):
        a, b, c, d = m1
        e, g, h, i = m2
        return (
            f.add[f.mul[a][e]][f.mul[b][h]],
            f.add[f.mul[a][g]][f.mul[b][i]],
            f.add[f.mul[c][e]][f.mul[d][h]],
            f.add[f.mul[c][g]][f.mul[d][i]],
        )

    return group_from_elements(elements, op)


def group_catalog() -> dict[str, GroupTable]:
    """Named test corpus: all abelian groups of order <= 32, dihedral groups
    of order <= 16, the quaternion group, symmetric degree <= 4, alternating
    degree <= 5 and SL2(q) for q <= 5."""
    from .enumeration import abelian_groups  # local import; no cycle at module load

    catalog: dict[str, GroupTable] = {}
    for n in range(1, 33):
        for factors in abelian_groups(n):
            name = "Z1" if not factors else "x".join(f"Z{m}" for m in factors)
            catalog[name] = abelian_group(factors)
    for n in range(3, 9):
        catalog[f"D{n}"] = dihedral_group(n)
    catalog["Q8"] = quaternion_group()
    for d in (2, 3, 4):
        catalog[f"S{d}"] = symmetric_group(d)
    for d in (3, 4, 5):
        catalog[f"A{d}"] = alternating_group(d)
    for q in (2, 3, 4, 5):
        catalog[f"SL2({q})"] = sl2(q)
    return catalog


# ---------------------------------------------------------------------------
# text format: like the quandle table format, with a "group n" header
# ---------------------------------------------------------------------------

def parse_group(text: str) -> GroupTable:
    rows = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "group":
                raise ValueError(f"line {lineno}: expected 'group n' header")
            n = int(parts[1])
            continue
        rows.append([int(tok) for tok in line.split()])
    if n is None:
        raise ValueError("empty input")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return group_from_table(rows)


def format_group(g: GroupTable) -> str:
    lines = [f"group {g.n}"]
    lines += [" ".join(map(str, row)) for row in g.table]
    return "\n".join(lines) + "\n"
