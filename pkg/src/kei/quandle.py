"""Finite involutory quandles as validated Cayley tables.

Elements are the dense integers 0..n-1 and the table stores x*y at row x,
column y.  A table is an involutory quandle when

    x*x = x                 (idempotence)
    x*(x*y) = y             (involutory)
    x*(y*z) = (x*y)*(x*z)   (left distributivity)

Row x of a valid table is the left translation L_x, always an involutory
automorphism fixing x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perms import Perm, compose, orbit_partition

AXIOM_IDEMPOTENCE = "idempotence"
AXIOM_INVOLUTORY = "involutory"
AXIOM_LEFT_DISTRIBUTIVITY = "left distributivity"

DEFAULT_CONGRUENCE_LIMIT = 30


class MalformedTable(ValueError):
    """Table is not a square array of in-range element indices."""


class AxiomViolation(ValueError):
    def __init__(self, axiom: str, witness: tuple[int, ...]):
        self.axiom = axiom
        self.witness = witness
        spots = ", ".join(f"{v}={w}" for v, w in zip("xyz", witness))
        super().__init__(f"{axiom} violated at {spots}")


class SizeLimit(ValueError):
    """Input exceeds the configured exhaustive-search bound."""


@dataclass(frozen=True)
class MagmaTable:
    """Raw, unvalidated binary operation table."""

    table: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.table)

    @staticmethod
    def from_rows(rows) -> "MagmaTable":
        table = tuple(tuple(int(v) for v in row) for row in rows)
        n = len(table)
        if n == 0:
            raise MalformedTable("empty table")
        for i, row in enumerate(table):
            if len(row) != n:
                raise MalformedTable(f"row {i} has {len(row)} entries, expected {n}")
            for j, v in enumerate(row):
                if not 0 <= v < n:
                    raise MalformedTable(f"entry [{i}][{j}] = {v} out of range")
        return MagmaTable(table)


@dataclass(frozen=True)
class Quandle:
    """Validated involutory quandle table; construct via validate()."""

    table: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.table)

    def op(self, x: int, y: int) -> int:
        return self.table[x][y]

    def row(self, x: int) -> Perm:
        """The left translation L_x as a permutation."""
        return self.table[x]

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.table for v in row)


@dataclass(frozen=True)
class IsoCertificate:
    """Bijection m on 0..n-1 with m(x*y) = m(x)*m(y) between two tables."""

    mapping: tuple[int, ...]


@dataclass(frozen=True)
class CongruencePartition:
    """Operation-compatible partition, stored as a block-id per element.

    Block ids are normalized to first-appearance order, so two partitions
    are equal iff their block arrays are equal.
    """

    blocks: tuple[int, ...]

    @property
    def block_count(self) -> int:
        return max(self.blocks) + 1

    def block_sets(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for x, b in enumerate(self.blocks):
            out.setdefault(b, []).append(x)
        return [tuple(out[b]) for b in sorted(out)]


@dataclass(frozen=True)
class PropertyRecord:
    latin: bool
    faithful: bool
    medial: bool
    balanced: bool


def _as_array(table) -> np.ndarray:
    return np.asarray(table, dtype=np.int64)


def validate(m: MagmaTable) -> Quandle:
    """Check the three identities, axiom by axiom in lexicographic scan order.

    Raises AxiomViolation carrying the first failing axiom and its witness:
    idempotence is scanned over x, the involutory law over (x, y) and left
    distributivity over (x, y, z), each in row-major order.
    """
    if isinstance(m, Quandle):
        return m
    if not isinstance(m, MagmaTable):
        m = MagmaTable.from_rows(m)
    t = m.table
    n = m.n
    for x in range(n):
        if t[x][x] != x:
            raise AxiomViolation(AXIOM_IDEMPOTENCE, (x,))
    for x in range(n):
        row = t[x]
        for y in range(n):
            if row[row[y]] != y:
                raise AxiomViolation(AXIOM_INVOLUTORY, (x, y))
    arr = _as_array(t)
    for x in range(n):
        row = arr[x]
        lhs = row[arr]                      # x*(y*z)
        rhs = arr[np.ix_(row, row)]         # (x*y)*(x*z)
        if not np.array_equal(lhs, rhs):
            y, z = np.argwhere(lhs != rhs)[0]
            raise AxiomViolation(AXIOM_LEFT_DISTRIBUTIVITY, (x, int(y), int(z)))
    return Quandle(t)


def quandle_from_rows(rows) -> Quandle:
    return validate(MagmaTable.from_rows(rows))


def is_latin(q: Quandle) -> bool:
    n = q.n
    full = set(range(n))
    return all({q.table[x][y] for x in range(n)} == full for y in range(n))


def is_faithful(q: Quandle) -> bool:
    return len(set(q.table)) == q.n


def is_medial(q: Quandle) -> bool:
    """(x*y)*(u*v) == (x*u)*(y*v) for all x, y, u, v (checked per x slice)."""
    arr = _as_array(q.table)
    for x in range(q.n):
        m = arr[arr[x]][:, arr]  # m[y, u, v] = (x*y)*(u*v)
        if not np.array_equal(m, m.transpose(1, 0, 2)):
            return False
    return True


def is_balanced(q: Quandle) -> bool:
    """x*y = y holds exactly when y*x = x."""
    t = q.table
    n = q.n
    return all((t[x][y] == y) == (t[y][x] == x) for x in range(n) for y in range(n))


def is_right_distributive(q: Quandle) -> bool:
    """(x*y)*z == (x*z)*(y*z) for all x, y, z (checked per x slice)."""
    arr = _as_array(q.table)
    for x in range(q.n):
        lhs = arr[arr[x]]                    # lhs[y, z] = (x*y)*z
        rhs = arr[arr[x][None, :], arr]      # rhs[y, z] = (x*z)*(y*z)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def basic_properties(q: Quandle) -> PropertyRecord:
    return PropertyRecord(
        latin=is_latin(q),
        faithful=is_faithful(q),
        medial=is_medial(q),
        balanced=is_balanced(q),
    )


def relabel(q: Quandle | MagmaTable, sigma: Perm) -> Quandle | MagmaTable:
    """Transport the table along x -> sigma[x]."""
    n = len(q.table)
    inv = [0] * n
    for i, j in enumerate(sigma):
        inv[j] = i
    rows = tuple(
        tuple(sigma[q.table[inv[x]][inv[y]]] for y in range(n)) for x in range(n)
    )
    return type(q)(rows)


def subquandle_generated(q: Quandle, seed) -> frozenset[int]:
    """Least subset containing seed and closed under the operation."""
    current = set(seed)
    frontier = list(current)
    while frontier:
        nxt = []
        for x in list(current):
            for y in frontier:
                for v in (q.table[x][y], q.table[y][x]):
                    if v not in current:
                        current.add(v)
                        nxt.append(v)
        frontier = nxt
    return frozenset(current)


def displacement_generators(q: Quandle) -> list[Perm]:
    """Generators L_0 L_a of the displacement group (empty for n = 1)."""
    rows = q.table
    return [compose(rows[0], rows[a]) for a in range(1, q.n)]


def orbit_decomposition(q: Quandle) -> list[tuple[int, ...]]:
    """Orbits of the displacement group; a single block iff connected."""
    return orbit_partition(q.n, displacement_generators(q))


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------
#
# canonical_labeling computes a relabeling whose table is minimal among a
# structurally defined family of labelings, so isomorphic inputs always land
# on the same table.  A labeling grows from a seed element.  Table cells are
# consumed in staircase blocks: after position m is labeled, the cells
# (0,m)..(m,m),(m,0)..(m,m-1) are read in that order; any cell value that is
# still unlabeled is assigned the next free position on first sight.  When
# every labeled row/column cell is consumed and elements remain, the next
# position is a free choice and all inequivalent candidates are branched on.
# The canonical form is the lexicographically least flattened table over all
# seeds and free choices.

def canonical_labeling(q: Quandle) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return (flat canonical table, labeling); labeling[i] = original element."""
    t = q.table
    n = q.n
    best: list[int] | None = None
    best_lab: list[int] | None = None

    def is_swap_automorphism(u: int, v: int) -> bool:
        sigma = list(range(n))
        sigma[u], sigma[v] = v, u
        return all(
            sigma[t[x][y]] == t[sigma[x]][sigma[y]] for x in range(n) for y in range(n)
        )

    def extend(lab: list[int], pos: dict[int, int], flat: list[int], tight: bool):
        nonlocal best, best_lab
        m = 0
        while m < n:
            if m == len(lab):
                # free choice of the element for position m
                tried: list[int] = []
                for cand in range(n):
                    if cand in pos:
                        continue
                    if any(is_swap_automorphism(prev, cand) for prev in tried):
                        continue
                    tried.append(cand)
                    lab2 = lab + [cand]
                    extend(lab2, {**pos, cand: m}, list(flat), tight)
                return
            cells = [(i, m) for i in range(m + 1)] + [(m, j) for j in range(m)]
            for i, j in cells:
                v = t[lab[i]][lab[j]]
                fv = pos.get(v)
                if fv is None:
                    fv = len(lab)
                    pos[v] = fv
                    lab.append(v)
                flat.append(fv)
                if tight and best is not None:
                    idx = len(flat) - 1
                    if fv > best[idx]:
                        return
                    if fv < best[idx]:
                        tight = False
            m += 1
        if best is None or flat < best:
            best = flat
            best_lab = lab

    for seed in range(n):
        extend([seed], {seed: 0}, [], True)
    assert best is not None and best_lab is not None
    return tuple(best), tuple(best_lab)


def canonical_form(q: Quandle) -> Quandle:
    """Deterministic representative of the isomorphism class of q."""
    flat, _ = canonical_labeling(q)
    n = q.n
    rows = tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))
    return Quandle(rows)


def are_isomorphic(a: Quandle, b: Quandle) -> IsoCertificate | None:
    """Isomorphism certificate a -> b when the canonical forms agree."""
    if a.n != b.n:
        return None
    flat_a, lab_a = canonical_labeling(a)
    flat_b, lab_b = canonical_labeling(b)
    if flat_a != flat_b:
        return None
    pos_a = [0] * a.n
    for i, x in enumerate(lab_a):
        pos_a[x] = i
    mapping = tuple(lab_b[pos_a[x]] for x in range(a.n))
    cert = IsoCertificate(mapping)
    assert certificate_is_valid(a, b, cert)
    return cert


def certificate_is_valid(a: Quandle, b: Quandle, cert: IsoCertificate) -> bool:
    m = cert.mapping
    if sorted(m) != list(range(a.n)):
        return False
    return all(
        m[a.table[x][y]] == b.table[m[x]][m[y]]
        for x in range(a.n)
        for y in range(a.n)
    )


# ---------------------------------------------------------------------------
# congruences
# ---------------------------------------------------------------------------

def _congruence_closure(q: Quandle, pairs) -> CongruencePartition:
    """Least congruence identifying the given pairs."""
    n = q.n
    t = q.table
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = list(pairs)
    while queue:
        a, b = queue.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if ra > rb:
            ra, rb = rb, ra
        parent[rb] = ra
        # compatibility: u ~ v forces w*u ~ w*v and u*w ~ v*w
        for w in range(n):
            queue.append((t[w][ra], t[w][rb]))
            queue.append((t[ra][w], t[rb][w]))
    ids: dict[int, int] = {}
    blocks = []
    for x in range(n):
        r = find(x)
        if r not in ids:
            ids[r] = len(ids)
        blocks.append(ids[r])
    return CongruencePartition(tuple(blocks))


def principal_congruence(q: Quandle, a: int, b: int) -> CongruencePartition:
    return _congruence_closure(q, [(a, b)])


def is_congruence(q: Quandle, part: CongruencePartition) -> bool:
    t = q.table
    n = q.n
    blk = part.blocks
    for x in range(n):
        for x2 in range(n):
            if blk[x] != blk[x2]:
                continue
            for y in range(n):
                if blk[t[x][y]] != blk[t[x2][y]] or blk[t[y][x]] != blk[t[y][x2]]:
                    return False
    return True


def congruences(q: Quandle, limit: int = DEFAULT_CONGRUENCE_LIMIT) -> list[CongruencePartition]:
    """All congruences, by join-closure of the principal ones.

    Exhaustive, so guarded by a size limit (SizeLimit beyond it).
    """
    n = q.n
    if n > limit:
        raise SizeLimit(f"congruence lattice computation limited to n <= {limit}")
    identity = CongruencePartition(tuple(range(n)))
    found = {identity}
    for a in range(n):
        for b in range(a + 1, n):
            found.add(principal_congruence(q, a, b))
    # close under joins
    changed = True
    while changed:
        changed = False
        items = sorted(found, key=lambda c: c.blocks)
        for i, ci in enumerate(items):
            for cj in items[i + 1 :]:
                pairs = []
                seen: dict[int, int] = {}
                for x in range(n):
                    if cj.blocks[x] in seen:
                        pairs.append((seen[cj.blocks[x]], x))
                    else:
                        seen[cj.blocks[x]] = x
                joined = _congruence_closure(
                    q, pairs + _pairs_of(ci)
                )
                if joined not in found:
                    found.add(joined)
                    changed = True
    return sorted(found, key=lambda c: (c.block_count, c.blocks), reverse=False)


def _pairs_of(part: CongruencePartition) -> list[tuple[int, int]]:
    seen: dict[int, int] = {}
    pairs = []
    for x, b in enumerate(part.blocks):
        if b in seen:
            pairs.append((seen[b], x))
        else:
            seen[b] = x
    return pairs


def is_simple_lattice(q: Quandle, limit: int = DEFAULT_CONGRUENCE_LIMIT) -> bool:
    """Simple = n >= 2 and every principal congruence collapses everything."""
    n = q.n
    if n > limit:
        raise SizeLimit(f"congruence lattice computation limited to n <= {limit}")
    if n < 2:
        return False
    for a in range(n):
        for b in range(a + 1, n):
            if principal_congruence(q, a, b).block_count != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
#
# Line 1 is the order n, followed by n rows of n space-separated 0-based
# entries.  Lines whose first non-blank character is '#' are comments.

def parse_table(text: str) -> MagmaTable:
    rows = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise MalformedTable(f"line {lineno}: expected order, got {line!r}")
            if n < 1:
                raise MalformedTable(f"line {lineno}: order must be >= 1")
            continue
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise MalformedTable(f"line {lineno}: non-integer entry")
        rows.append(row)
    if n is None:
        raise MalformedTable("empty input")
    if len(rows) != n:
        raise MalformedTable(f"expected {n} rows, got {len(rows)}")
    return MagmaTable.from_rows(rows)


def format_table(q: Quandle | MagmaTable) -> str:
    lines = [str(len(q.table))]
    lines += [" ".join(map(str, row)) for row in q.table]
    return "\n".join(lines) + "\n"
