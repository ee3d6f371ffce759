"""Structure analysis of involutory quandles through their translation groups.

The multiplication group LMlt is generated by the left translations, the
displacement group Dis by products of two of them.  Most structural facts
checked here come in pairs (a direct table identity next to a group-theoretic
criterion); the analysis computes both sides so the test suite can compare
them across a corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perms import Perm, compose
from .permgroup import PermGroup
from .quandle import (
    Quandle,
    is_balanced,
    is_faithful,
    is_latin,
    is_medial,
    is_simple_lattice,
    orbit_decomposition,
)


def lmlt(q: Quandle) -> PermGroup:
    """Multiplication group, generated by all left translations."""
    return PermGroup(q.n, q.table)


def dis(q: Quandle) -> PermGroup:
    """Displacement group; L_0 L_a for a in Q generate it."""
    rows = q.table
    return PermGroup(q.n, [compose(rows[0], rows[a]) for a in range(1, q.n)])


def orbit_count(q: Quandle) -> int:
    return len(orbit_decomposition(q))


def is_connected(q: Quandle) -> bool:
    """The displacement group acts transitively."""
    return orbit_count(q) == 1


@dataclass(frozen=True)
class CycleProfile:
    """Orbit length of each a under iteration of L_e o L_a."""

    basepoint: int
    lengths: tuple[int, ...]


def cycle_profile(q: Quandle, e: int) -> CycleProfile:
    rows = q.table
    n = q.n
    lengths = []
    for a in range(n):
        step = rows[e]
        ra = rows[a]
        x = a
        length = 0
        while True:
            x = step[ra[x]]
            length += 1
            if x == a:
                break
        lengths.append(length)
    return CycleProfile(e, tuple(lengths))


@dataclass(frozen=True)
class LatinCriteria:
    direct: bool
    odd_cycles: bool
    odd_derived: bool


def latin_criteria(q: Quandle) -> LatinCriteria:
    """Three latin tests; they provably agree on connected quandles only.

    direct: every right translation is a bijection.
    odd_cycles: every cycle length over every basepoint is odd.
    odd_derived: the derived subgroup of LMlt has odd order.
    """
    direct = is_latin(q)
    odd_cycles = all(
        length % 2 == 1 for e in range(q.n) for length in cycle_profile(q, e).lengths
    )
    odd_derived = lmlt(q).derived_subgroup().order() % 2 == 1
    return LatinCriteria(direct, odd_cycles, odd_derived)


@dataclass(frozen=True)
class MedialCriteria:
    identity_check: bool
    dis_abelian: bool


def medial_criteria(q: Quandle) -> MedialCriteria:
    return MedialCriteria(is_medial(q), dis(q).is_abelian())


@dataclass(frozen=True)
class SimplicityCriteria:
    lattice: bool
    group_criterion: bool


def simplicity_criteria(q: Quandle, limit: int = 30) -> SimplicityCriteria:
    """Congruence-lattice simplicity next to the group-theoretic test
    (connected, faithful, Dis minimal normal in LMlt)."""
    lattice = is_simple_lattice(q, limit)
    group_criterion = (
        is_connected(q)
        and is_faithful(q)
        and lmlt(q).is_minimal_normal(dis(q))
    )
    return SimplicityCriteria(lattice, group_criterion)


class NotSimple(ValueError):
    pass


@dataclass(frozen=True)
class SimpleStructureReport:
    dis_order: int
    dis_minimal_normal: bool
    conjugate_pair_branch: bool  # |Dis| = |Q|^2, the two-simple-factors case


def simple_structure_check(q: Quandle) -> SimpleStructureReport:
    """For a simple quandle, report how Dis sits inside LMlt."""
    if not is_simple_lattice(q):
        raise NotSimple(f"quandle of order {q.n} is not simple")
    d = dis(q)
    return SimpleStructureReport(
        dis_order=d.order(),
        dis_minimal_normal=lmlt(q).is_minimal_normal(d),
        conjugate_pair_branch=d.order() == q.n * q.n,
    )


def translation_conjugation_holds(q: Quandle) -> bool:
    """L_{x*y} = L_x L_y L_x for all x, y (a consequence of the axioms)."""
    rows = q.table
    n = q.n
    for x in range(n):
        rx = rows[x]
        for y in range(n):
            if rows[rx[y]] != compose(rx, compose(rows[y], rx)):
                return False
    return True


@dataclass(frozen=True)
class AnalysisReport:
    n: int
    connected: bool
    faithful: bool
    latin: bool
    medial: bool
    balanced: bool
    simple: bool
    lmlt_order: int
    dis_order: int
    lmlt_derived_order: int
    orbit_count: int
    cycle_lengths: tuple[tuple[int, ...], ...]  # row e = profile at basepoint e


def analyze(q: Quandle, congruence_limit: int = 30) -> AnalysisReport:
    """Full structural report; simplicity falls back to the group criterion
    when the order exceeds the congruence-lattice limit."""
    blocks = orbit_decomposition(q)
    group = lmlt(q)
    displacement = dis(q)
    if q.n <= congruence_limit:
        simple = is_simple_lattice(q, congruence_limit)
    else:
        simple = (
            len(blocks) == 1
            and is_faithful(q)
            and group.is_minimal_normal(displacement)
        )
    report = AnalysisReport(
        n=q.n,
        connected=len(blocks) == 1,
        faithful=is_faithful(q),
        latin=is_latin(q),
        medial=is_medial(q),
        balanced=is_balanced(q),
        simple=simple,
        lmlt_order=group.order(),
        dis_order=displacement.order(),
        lmlt_derived_order=group.derived_subgroup().order(),
        orbit_count=len(blocks),
        cycle_lengths=tuple(cycle_profile(q, e).lengths for e in range(q.n)),
    )
    assert report.connected == (report.orbit_count == 1)
    return report
