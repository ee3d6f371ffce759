"""Permutations of {0, ..., n-1} represented as tuples of images.

``p[i]`` is the image of the point ``i``.  Composition follows the usual
function-composition convention: ``compose(p, q)`` applies ``q`` first.
"""

from __future__ import annotations

from collections.abc import Iterable

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_permutation(p: Iterable[int], n: int) -> bool:
    p = tuple(p)
    return len(p) == n and sorted(p) == list(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """p after q: x -> p[q[x]]."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def conjugate(p: Perm, g: Perm) -> Perm:
    """g p g^-1."""
    inv_g = inverse(g)
    return tuple(g[p[inv_g[i]]] for i in range(len(p)))


def commutator(p: Perm, q: Perm) -> Perm:
    """p q p^-1 q^-1."""
    return compose(compose(p, q), inverse(compose(q, p)))


def is_involution(p: Perm) -> bool:
    return all(p[p[i]] == i for i in range(len(p)))


def cycle_lengths(p: Perm) -> tuple[int, ...]:
    """Sorted cycle lengths of p, fixed points included."""
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths))


def two_cycle_count(p: Perm) -> int:
    """Number of transposed pairs of an involution."""
    return sum(1 for i in range(len(p)) if p[i] != i) // 2


def orbit_of(point: int, gens: Iterable[Perm]) -> frozenset[int]:
    gens = list(gens)
    seen = {point}
    queue = [point]
    while queue:
        x = queue.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def orbit_partition(n: int, gens: Iterable[Perm]) -> list[tuple[int, ...]]:
    """Orbits of <gens> on {0..n-1}, each sorted, ordered by least element."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in range(n):
            a, b = find(x), find(g[x])
            if a != b:
                if a > b:
                    a, b = b, a
                parent[b] = a
    blocks: dict[int, list[int]] = {}
    for x in range(n):
        blocks.setdefault(find(x), []).append(x)
    return [tuple(blocks[r]) for r in sorted(blocks)]


def format_cycles(p: Perm) -> str:
    """Cycle notation, e.g. '(0 1)(2 3 4)'; '()' for the identity."""
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        parts.append("(%s)" % " ".join(map(str, cyc)))
    return "".join(parts) if parts else "()"
