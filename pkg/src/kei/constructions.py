"""Involutory quandles built from groups, bilinear forms and geometry.

Every finite construction validates its output table before returning, so a
failure here is a bug rather than a bad input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gf import GF, gf
from .permgroup import GroupTable
from .quandle import MagmaTable, Quandle, validate


def core_of_group(g: GroupTable) -> Quandle:
    """Core of a group: a*b = a b^-1 a on the underlying set."""
    t = g.table
    inv = g.inverse
    rows = tuple(
        tuple(t[t[a][inv[b]]][a] for b in range(g.n)) for a in range(g.n)
    )
    return validate(MagmaTable(rows))


def abelian_core(invariant_factors) -> Quandle:
    """Core of a direct product of cyclic groups: componentwise 2a - b."""
    factors = list(invariant_factors)
    if any(m < 2 for m in factors):
        raise ValueError("invariant factors must be >= 2")
    if not factors:
        return validate(MagmaTable(((0,),)))
    n = math.prod(factors)

    def decode(i: int) -> list[int]:
        out = []
        for m in reversed(factors):
            out.append(i % m)
            i //= m
        return out[::-1]

    def encode(v) -> int:
        i = 0
        for m, x in zip(factors, v):
            i = i * m + x
        return i

    rows = tuple(
        tuple(
            encode([(2 * x - y) % m for m, x, y in zip(factors, decode(a), decode(b))])
            for b in range(n)
        )
        for a in range(n)
    )
    return validate(MagmaTable(rows))


def dihedral_quandle(n: int) -> Quandle:
    """Core of the cyclic group of order n (x*y = 2x - y mod n)."""
    if n == 1:
        return abelian_core([])
    return abelian_core([n])


def conj_involutions(g: GroupTable) -> Quandle:
    """Conjugation quandle x*y = xyx on {x in g : x^2 = identity}.

    The group identity satisfies the condition and is always included; it is
    a fixed point of every translation.
    """
    members = [x for x in range(g.n) if g.table[x][x] == g.identity]
    index = {x: i for i, x in enumerate(members)}
    t = g.table
    rows = tuple(
        tuple(index[t[t[x][y]][x]] for y in members) for x in members
    )
    return validate(MagmaTable(rows))


# ---------------------------------------------------------------------------
# reflection quandles over small finite fields
# ---------------------------------------------------------------------------

class EmptyQuandle(ValueError):
    """The form admits no vectors of norm 1."""


@dataclass(frozen=True)
class BilinearForm:
    """Non-degenerate symmetric bilinear form over a field of odd order."""

    field: GF
    dim: int
    matrix: tuple[tuple[int, ...], ...]

    @property
    def q(self) -> int:
        return self.field.q

    def apply(self, u, v) -> int:
        f = self.field
        total = 0
        for i in range(self.dim):
            if u[i] == 0:
                continue
            for j in range(self.dim):
                total = f.add[total][f.mul[u[i]][f.mul[self.matrix[i][j]][v[j]]]]
        return total


def bilinear_form(q: int, matrix) -> BilinearForm:
    if q % 2 == 0:
        raise ValueError("field characteristic must be odd")
    f = gf(q)
    m = tuple(tuple(int(v) % q for v in row) for row in matrix)
    dim = len(m)
    if any(len(row) != dim for row in m):
        raise ValueError("matrix is not square")
    if any(m[i][j] != m[j][i] for i in range(dim) for j in range(dim)):
        raise ValueError("matrix is not symmetric")
    if _det(f, m) == 0:
        raise ValueError("form is degenerate")
    return BilinearForm(f, dim, m)


def identity_form(q: int, dim: int) -> BilinearForm:
    return bilinear_form(q, [[1 if i == j else 0 for j in range(dim)] for i in range(dim)])


def _det(f: GF, m) -> int:
    """Determinant over the field by cofactor expansion (dim is tiny)."""
    dim = len(m)
    if dim == 1:
        return m[0][0]
    total = 0
    sign = 0
    for j in range(dim):
        minor = [
            [m[i][jj] for jj in range(dim) if jj != j] for i in range(1, dim)
        ]
        term = f.mul[m[0][j]][_det(f, minor)]
        total = f.add[total][term if sign == 0 else f.neg(term)]
        sign ^= 1
    return total


def _vectors(q: int, dim: int):
    vec = [0] * dim
    while True:
        yield tuple(vec)
        i = dim - 1
        while i >= 0 and vec[i] == q - 1:
            vec[i] = 0
            i -= 1
        if i < 0:
            return
        vec[i] += 1


def _canonical_line_rep(f: GF, v):
    """Scale so that the first nonzero coordinate is 1."""
    lead = next(x for x in v if x != 0)
    s = f.inv(lead)
    return tuple(f.mul[s][x] for x in v)


def reflection_quandle(form: BilinearForm) -> Quandle:
    """Lines spanned by norm-1 vectors, acted on by orthogonal reflections.

    The element for a line <a> with g(a, a) = 1 sends <b> to the line of
    b - 2 g(a, b) a; the two norm-1 vectors of a line are +-a and give the
    same reflection, so the operation is well defined.
    """
    f = form.field
    q, dim = f.q, form.dim
    lines: dict[tuple[int, ...], tuple[int, ...]] = {}  # canonical rep -> norm-1 rep
    for v in _vectors(q, dim):
        if all(x == 0 for x in v):
            continue
        rep = _canonical_line_rep(f, v)
        if rep in lines or rep != v:
            continue
        norm = form.apply(rep, rep)
        if norm == 0:
            continue
        root = f.sqrt(f.inv(norm))
        if root is None:
            continue
        unit = tuple(f.mul[root][x] for x in rep)
        lines[rep] = unit
    if not lines:
        raise EmptyQuandle("no lines of square norm")
    reps = sorted(lines)
    index = {rep: i for i, rep in enumerate(reps)}
    two = f.add[1][1]

    def reflect(unit, w):
        c = f.mul[two][form.apply(unit, w)]
        return tuple(f.sub(w[i], f.mul[c][unit[i]]) for i in range(dim))

    rows = []
    for rep_a in reps:
        unit = lines[rep_a]
        row = []
        for rep_b in reps:
            image = _canonical_line_rep(f, reflect(unit, rep_b))
            row.append(index[image])
        rows.append(tuple(row))
    return validate(MagmaTable(tuple(rows)))


@dataclass(frozen=True)
class ReflectionReport:
    """Empirical connectivity next to the textbook criterion's verdict."""

    order: int
    orbit_count: int
    connected: bool
    criterion_satisfied: bool


def reflection_connectivity_report(form: BilinearForm) -> ReflectionReport:
    """The stated criterion (two independent vectors of equal nonzero norm)
    is reported side by side with the computed orbit count; the two are known
    to disagree on small fields, so neither is asserted against the other."""
    from .analysis import orbit_count as _orbit_count

    quandle = reflection_quandle(form)
    f = form.field
    by_norm: dict[int, list[tuple[int, ...]]] = {}
    for v in _vectors(f.q, form.dim):
        if all(x == 0 for x in v):
            continue
        norm = form.apply(v, v)
        if norm != 0:
            by_norm.setdefault(norm, []).append(v)
    criterion = False
    for vecs in by_norm.values():
        reps = {_canonical_line_rep(f, v) for v in vecs}
        if len(reps) >= 2:
            criterion = True
            break
    orbits = _orbit_count(quandle)
    return ReflectionReport(quandle.n, orbits, orbits == 1, criterion)


# ---------------------------------------------------------------------------
# the hyperboloid model (floating point)
# ---------------------------------------------------------------------------

SURFACE_TOLERANCE = 1e-9


class ToleranceViolation(ArithmeticError):
    pass


@dataclass(frozen=True)
class LorentzPoint:
    x1: float
    x2: float
    x3: float


def minkowski(x: LorentzPoint, y: LorentzPoint) -> float:
    return -x.x1 * y.x1 - x.x2 * y.x2 + x.x3 * y.x3


def surface_residual(p: LorentzPoint) -> float:
    return abs(p.x1 * p.x1 + p.x2 * p.x2 - p.x3 * p.x3 + 1.0)


def lorentz_point(x1: float, x2: float, x3: float) -> LorentzPoint:
    p = LorentzPoint(x1, x2, x3)
    if surface_residual(p) > SURFACE_TOLERANCE or x3 <= 0:
        raise ToleranceViolation(f"point off the surface: {p}")
    return p


def hyperboloid_point(r: float, theta: float) -> LorentzPoint:
    """Point at hyperbolic distance r from the apex, direction theta."""
    return lorentz_point(
        math.sinh(r) * math.cos(theta), math.sinh(r) * math.sin(theta), math.cosh(r)
    )


def hyperboloid_op(x: LorentzPoint, y: LorentzPoint) -> LorentzPoint:
    """Point symmetry x*y = 2<x,y> x - y on the upper sheet."""
    c = 2.0 * minkowski(x, y)
    p = LorentzPoint(c * x.x1 - y.x1, c * x.x2 - y.x2, c * x.x3 - y.x3)
    if p.x3 < 0:
        p = LorentzPoint(-p.x1, -p.x2, -p.x3)
    if surface_residual(p) > SURFACE_TOLERANCE:
        raise ToleranceViolation(f"result drifted off the surface: {p}")
    return p


def sample_hyperboloid(count: int, rng, max_radius: float = 1.2) -> list[LorentzPoint]:
    """Deterministic sample of surface points from a seeded Random."""
    return [
        hyperboloid_point(rng.uniform(0.0, max_radius), rng.uniform(0.0, 2.0 * math.pi))
        for _ in range(count)
    ]
