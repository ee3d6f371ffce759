"""Involutory knot quandles: presentations, diagrams and table completion.

A presentation lists generators and relations a*b = c.  Completion saturates
a partially defined table under the relations, idempotence, the involutory
law and the translation-conjugation law L_{x*y} = L_x L_y L_x, merging
elements forced equal through a union-find, until the table closes or the
element count passes a bound.  The deduction style follows coset enumeration:
every recorded product doubles as a relator that is rescanned whenever one of
its columns gains an entry.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .quandle import MagmaTable, Quandle, validate

DEFAULT_COMPLETION_BOUND = 10_000

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CHARS = _NAME_START | set("0123456789")


def completion_bound() -> int:
    return int(os.environ.get("QF_MAX_ELEMENTS", DEFAULT_COMPLETION_BOUND))


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UndeclaredGenerator(ValueError):
    pass


class InconsistentArcs(ValueError):
    pass


class CompletionOverflow(RuntimeError):
    def __init__(self, bound: int):
        self.bound = bound
        super().__init__(f"completion exceeded {bound} elements")


@dataclass(frozen=True)
class Word:
    """Left-normed term a_k(...(a_1 g)...): applicators over a terminal."""

    applicators: tuple[str, ...]
    terminal: str

    def __str__(self) -> str:
        out = self.terminal
        for a in reversed(self.applicators):
            out = f"({a} {out})"
        return out


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[Word, Word, Word], ...]


@dataclass(frozen=True)
class CrossingList:
    """Knot diagram as (bridge, under-in, under-out) arc triples."""

    arcs: tuple[str, ...]
    crossings: tuple[tuple[str, str, str], ...]


def gen_word(name: str) -> Word:
    return Word((), name)


def normalize_word(w: Word) -> Word:
    """Reduce x(x u) -> u and drop an applicator equal to the current head."""
    stack: list[str] = []
    for a in reversed(w.applicators):  # innermost application first
        if stack and stack[-1] == a:
            stack.pop()
        elif not stack and a == w.terminal:
            continue
        else:
            stack.append(a)
    return Word(tuple(reversed(stack)), w.terminal)


def word_length(w: Word) -> int:
    return len(w.applicators)


def eval_word(w: Word, assignment, op) -> object:
    """Fold the word through a binary operation, applicators outside-in."""
    value = assignment[w.terminal]
    for a in reversed(w.applicators):
        value = op(assignment[a], value)
    return value


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _tokenize(text: str):
    """Yield (line, column, token); tokens are names, parens, '=' and ';'."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0] if raw.lstrip().startswith("#") else raw
        col = 0
        while col < len(line):
            ch = line[col]
            if ch.isspace():
                col += 1
                continue
            if ch in "();=":
                yield lineno, col + 1, ch
                col += 1
                continue
            if ch in _NAME_START:
                start = col
                while col < len(line) and line[col] in _NAME_CHARS:
                    col += 1
                yield lineno, start + 1, line[start:col]
                continue
            raise PresentationSyntaxError(f"unexpected character {ch!r}", lineno, col + 1)
        yield lineno, len(line) + 1, ";"  # line break ends a statement


def parse_presentation(text: str) -> Presentation:
    """Parse 'gens a b c' and 'rel W W = W' statements.

    Statements are separated by newlines or semicolons; compound words are
    parenthesized, e.g. 'rel (a (b c)) d = e'.
    """
    tokens = list(_tokenize(text))
    statements: list[list[tuple[int, int, str]]] = []
    current: list[tuple[int, int, str]] = []
    for tok in tokens:
        if tok[2] == ";":
            if current:
                statements.append(current)
                current = []
        else:
            current.append(tok)
    if current:
        statements.append(current)

    generators: list[str] = []
    declared: set[str] = set()
    relations: list[tuple[Word, Word, Word]] = []

    def parse_word(stmt, i) -> tuple[Word, int]:
        line, col, tok = stmt[i]
        if tok == "(":
            if i + 1 >= len(stmt):
                raise PresentationSyntaxError("unterminated word", line, col)
            line2, col2, head = stmt[i + 1]
            if head in "();=":
                raise PresentationSyntaxError("expected generator name", line2, col2)
            inner, j = parse_word(stmt, i + 2)
            if j >= len(stmt) or stmt[j][2] != ")":
                raise PresentationSyntaxError("expected ')'", line, col)
            return Word((head,) + inner.applicators, inner.terminal), j + 1
        if tok in ");=":
            raise PresentationSyntaxError("expected a word", line, col)
        return Word((), tok), i + 1

    for stmt in statements:
        line, col, head = stmt[0]
        if head == "gens":
            if len(stmt) == 1:
                raise PresentationSyntaxError("'gens' needs at least one name", line, col)
            for lineno, c, name in stmt[1:]:
                if name in "();=":
                    raise PresentationSyntaxError("bad generator name", lineno, c)
                if name in declared:
                    raise PresentationSyntaxError(f"duplicate generator {name!r}", lineno, c)
                declared.add(name)
                generators.append(name)
        elif head == "rel":
            w1, i = parse_word(stmt, 1)
            w2, i = parse_word(stmt, i)
            if i >= len(stmt) or stmt[i][2] != "=":
                li, ci, _ = stmt[i] if i < len(stmt) else stmt[-1]
                raise PresentationSyntaxError("expected '='", li, ci)
            w3, i = parse_word(stmt, i + 1)
            if i != len(stmt):
                li, ci, _ = stmt[i]
                raise PresentationSyntaxError("trailing tokens after relation", li, ci)
            for w in (w1, w2, w3):
                for name in (*w.applicators, w.terminal):
                    if name not in declared:
                        raise UndeclaredGenerator(f"undeclared generator {name!r}")
            relations.append((w1, w2, w3))
        else:
            raise PresentationSyntaxError(f"unknown statement {head!r}", line, col)
    return Presentation(tuple(generators), tuple(relations))


def parse_crossings(text: str) -> CrossingList:
    """Parse 'x <over> <under1> <under2>' lines, plus optional 'arcs' lines.

    An 'arcs a b c' line declares arcs explicitly; this is how a 0-crossing
    unknot diagram is written.  Arc names otherwise appear on first use.
    """
    arcs: list[str] = []
    seen: set[str] = set()
    crossings: list[tuple[str, str, str]] = []

    def note(name: str):
        if name not in seen:
            seen.add(name)
            arcs.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "arcs":
            if len(parts) == 1:
                raise PresentationSyntaxError("'arcs' needs at least one name", lineno, 1)
            for name in parts[1:]:
                note(name)
        elif parts[0] == "x":
            if len(parts) != 4:
                raise PresentationSyntaxError(
                    "crossing needs exactly 3 arc names", lineno, 1
                )
            over, u1, u2 = parts[1:]
            for name in (over, u1, u2):
                note(name)
            crossings.append((over, u1, u2))
        else:
            raise PresentationSyntaxError(f"unknown line {parts[0]!r}", lineno, 1)
    if not arcs:
        raise InconsistentArcs("diagram has no arcs")
    return CrossingList(tuple(arcs), tuple(crossings))


def crossings_to_presentation(d: CrossingList) -> Presentation:
    """One generator per arc, one relation bridge*under1 = under2 per crossing.

    The under-arc order is immaterial for involutory quandles (a*b = c iff
    a*c = b), and completion treats both orders identically.
    """
    if not d.arcs:
        raise InconsistentArcs("diagram has no arcs")
    relations = tuple(
        (gen_word(over), gen_word(u1), gen_word(u2)) for over, u1, u2 in d.crossings
    )
    return Presentation(tuple(d.arcs), relations)


# ---------------------------------------------------------------------------
# completion
# ---------------------------------------------------------------------------

class CompletionState:
    """Partial quandle table under saturation.

    Elements are created on demand and merged through a union-find (the
    smaller index survives).  rows[x] maps y -> x*y for root indices; each
    row is kept involutive.  Deductions flow through a FIFO queue of edge
    events; every known product (a, b, c) acts as the relator
    a*(c*w) = b*(a*w) and is rescanned whenever column a, b or c changes.
    """

    def __init__(self, bound: int):
        self.bound = bound
        self.parent: list[int] = []
        self.rows: list[dict[int, int]] = []
        self.live = 0
        self.pending_unions: deque[tuple[int, int]] = deque()
        self.tasks: deque[tuple[int, int, int]] = deque()  # edge events
        self.rel_by_col: dict[int, set[tuple[int, int, int]]] = {}

    # -- union-find ---------------------------------------------------------

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def live_roots(self) -> list[int]:
        return [x for x in range(len(self.parent)) if self.parent[x] == x]

    # -- elements and products ----------------------------------------------

    def new_element(self) -> int:
        if self.live + 1 > self.bound:
            raise CompletionOverflow(self.bound)
        x = len(self.parent)
        self.parent.append(x)
        self.rows.append({})
        self.live += 1
        self.record(x, x, x)  # idempotence
        return x

    def product(self, x: int, y: int) -> int | None:
        z = self.rows[self.find(x)].get(self.find(y))
        return None if z is None else self.find(z)

    def record(self, x: int, y: int, z: int):
        """Assert x*y = z (and x*z = y); queues a union on conflict."""
        x, y, z = self.find(x), self.find(y), self.find(z)
        row = self.rows[x]
        cur = row.get(y)
        if cur is not None:
            if self.find(cur) != z:
                self.pending_unions.append((cur, z))
            return
        row[y] = z
        mirror = row.get(z)
        if mirror is None:
            row[z] = y
        elif self.find(mirror) != y:
            self.pending_unions.append((mirror, y))
        self.tasks.append((x, y, z))

    # -- merging -------------------------------------------------------------

    def _union(self, a: int, b: int):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.live -= 1
        dead_row = self.rows[b]
        self.rows[b] = {}
        rels = self.rel_by_col.pop(b, None)
        if rels:
            self.rel_by_col.setdefault(a, set()).update(rels)
        for y, z in sorted(dead_row.items()):
            self.record(a, y, z)
        for x in self.live_roots():
            row = self.rows[x]
            if b in row:
                z = row.pop(b)
                self.record(x, a, z)

    # -- relator scanning -----------------------------------------------------

    def _scan(self, a: int, b: int, c: int, w: int):
        """One instance of a*(c*w) = b*(a*w); fills the one missing link."""
        a, b, c, w = self.find(a), self.find(b), self.find(c), self.find(w)
        t1 = self.product(c, w)
        s1 = self.product(a, w)
        if t1 is not None and s1 is not None:
            t2 = self.product(a, t1)
            if t2 is not None:
                self.record(b, s1, t2)
            else:
                s2 = self.product(b, s1)
                if s2 is not None:
                    self.record(a, t1, s2)
        elif t1 is not None:
            t2 = self.product(a, t1)
            if t2 is not None:
                s1b = self.product(b, t2)
                if s1b is not None:
                    self.record(a, w, s1b)
        elif s1 is not None:
            s2 = self.product(b, s1)
            if s2 is not None:
                t1b = self.product(a, s2)
                if t1b is not None:
                    self.record(c, w, t1b)

    def _register_relator(self, a: int, b: int, c: int):
        rel = (a, b, c)
        for col in {a, b, c}:
            self.rel_by_col.setdefault(col, set()).add(rel)
        targets = sorted(set(self.rows[c]) | set(self.rows[a]))
        for w in targets:
            self._scan(a, b, c, w)

    def _edge_event(self, x: int, u: int, v: int):
        x, u, v = self.find(x), self.find(u), self.find(v)
        self._register_relator(x, u, v)
        if u != v:
            self._register_relator(x, v, u)
        hits = self.rel_by_col.get(x)
        if not hits:
            return
        for rel in sorted(hits):
            a, b, c = (self.find(t) for t in rel)
            ws = set()
            if c == x or a == x:
                ws.update((u, v))
            if a == x:
                for t1 in (u, v):
                    w = self.product(c, t1)
                    if w is not None:
                        ws.add(w)
            if b == x:
                for s1 in (u, v):
                    w = self.product(a, s1)
                    if w is not None:
                        ws.add(w)
            for w in sorted(ws):
                self._scan(a, b, c, w)

    def drain(self):
        while self.pending_unions or self.tasks:
            while self.pending_unions:
                a, b = self.pending_unions.popleft()
                self._union(a, b)
            if self.tasks:
                x, u, v = self.tasks.popleft()
                self._edge_event(x, u, v)

    # -- systematic definition -----------------------------------------------

    def first_undefined(self) -> tuple[int, int] | None:
        roots = self.live_roots()
        for x in roots:
            row = self.rows[x]
            for y in roots:
                if y not in row:
                    return x, y
        return None

    def run(self):
        """Define missing products in lexicographic scan order until total."""
        self.drain()
        while True:
            cell = self.first_undefined()
            if cell is None:
                return
            x, y = cell
            z = self.new_element()
            self.record(x, y, z)
            self.drain()

    def extract(self) -> tuple[Quandle, dict[int, int]]:
        """Total table over live roots, relabeled to 0..n-1."""
        roots = self.live_roots()
        index = {r: i for i, r in enumerate(roots)}
        rows = tuple(
            tuple(index[self.find(self.rows[x][y])] for y in roots) for x in roots
        )
        return validate(MagmaTable(rows)), index


def complete_with_assignment(
    p: Presentation, max_elements: int | None = None
) -> tuple[Quandle, dict[str, int]]:
    """Completion plus the generator-to-element assignment."""
    if not p.generators:
        raise ValueError("presentation has no generators")
    bound = completion_bound() if max_elements is None else max_elements
    if bound < 1:
        raise ValueError("max_elements must be >= 1")
    state = CompletionState(bound)
    elem = {name: state.new_element() for name in p.generators}

    def eval_in_state(w: Word) -> int:
        value = state.find(elem[w.terminal])
        for a in reversed(w.applicators):
            left = state.find(elem[a])
            known = state.product(left, value)
            if known is None:
                known = state.new_element()
                state.record(left, value, known)
                state.drain()
            value = state.find(known)
        return value

    for w1, w2, w3 in p.relations:
        x = eval_in_state(w1)
        y = eval_in_state(w2)
        z = eval_in_state(w3)
        state.record(x, y, z)
        state.drain()
    state.run()
    quandle, index = state.extract()
    assignment = {name: index[state.find(e)] for name, e in elem.items()}
    return quandle, assignment


def complete(p: Presentation, max_elements: int | None = None) -> Quandle:
    """The finite involutory quandle presented by p, if it fits the bound."""
    return complete_with_assignment(p, max_elements)[0]


# ---------------------------------------------------------------------------
# unknot detection
# ---------------------------------------------------------------------------

_QUOTIENT_MODULI = (3, 5, 7, 11, 13)


@dataclass(frozen=True)
class UnknotResult:
    verdict: str  # "trivial" | "nontrivial" | "inconclusive"
    order: int | None = None
    separating_modulus: int | None = None


def dihedral_coloring_exists(d: CrossingList, modulus: int) -> bool:
    """Non-constant arc coloring with 2*over = under1 + under2 (mod prime)."""
    arcs = {name: i for i, name in enumerate(d.arcs)}
    n = len(arcs)
    matrix = []
    for over, u1, u2 in d.crossings:
        row = [0] * n
        row[arcs[over]] = (row[arcs[over]] + 2) % modulus
        row[arcs[u1]] = (row[arcs[u1]] - 1) % modulus
        row[arcs[u2]] = (row[arcs[u2]] - 1) % modulus
        matrix.append(row)
    rank = 0
    col = 0
    while col < n and rank < len(matrix):
        pivot = next((r for r in range(rank, len(matrix)) if matrix[r][col]), None)
        if pivot is None:
            col += 1
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        inv = pow(matrix[rank][col], -1, modulus)
        matrix[rank] = [(v * inv) % modulus for v in matrix[rank]]
        for r in range(len(matrix)):
            if r != rank and matrix[r][col]:
                f = matrix[r][col]
                matrix[r] = [
                    (v - f * w) % modulus for v, w in zip(matrix[r], matrix[rank])
                ]
        rank += 1
        col += 1
    return n - rank >= 2  # beyond the constant colorings


def unknot_test(d: CrossingList, bound: int | None = None) -> UnknotResult:
    """Trivial iff the involutory knot quandle collapses to one element.

    On overflow, surjections onto dihedral quandles of small prime order are
    tried as separating quotients before giving up.
    """
    p = crossings_to_presentation(d)
    try:
        q = complete(p, bound)
    except CompletionOverflow:
        for modulus in _QUOTIENT_MODULI:
            if dihedral_coloring_exists(d, modulus):
                return UnknotResult("nontrivial", separating_modulus=modulus)
        return UnknotResult("inconclusive")
    if q.n == 1:
        return UnknotResult("trivial", order=1)
    return UnknotResult("nontrivial", order=q.n)
