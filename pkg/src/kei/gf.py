"""Small finite fields with precomputed arithmetic tables.

Supports prime fields GF(p) and the two prime-square fields needed by the
constructions: GF(4) = GF(2)[x]/(x^2+x+1) and GF(9) = GF(3)[x]/(x^2+1).
Field elements are integers 0..q-1; in GF(p^2) the element a + b*x is
encoded as a + p*b, so 0 and 1 are always the additive and multiplicative
identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# irreducible x^2 + c1*x + c0 over GF(p), per supported square
_IRREDUCIBLE = {4: (1, 1), 9: (0, 1)}  # q -> (c1, c0)


@dataclass(frozen=True)
class GF:
    """Finite field of order q with full addition/multiplication tables."""

    q: int
    p: int
    add: tuple[tuple[int, ...], ...] = field(repr=False)
    mul: tuple[tuple[int, ...], ...] = field(repr=False)

    def neg(self, a: int) -> int:
        return next(b for b in range(self.q) if self.add[a][b] == 0)

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg(b)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return next(b for b in range(self.q) if self.mul[a][b] == 1)

    def squares(self) -> frozenset[int]:
        return frozenset(self.mul[a][a] for a in range(self.q))

    def sqrt(self, a: int) -> int | None:
        """Some square root of a, or None; the smaller of the two roots."""
        for b in range(self.q):
            if self.mul[b][b] == a:
                return b
        return None


def gf(q: int) -> GF:
    """Field of order q; q prime, or 4 or 9."""
    if _is_prime(q):
        add = tuple(tuple((a + b) % q for b in range(q)) for a in range(q))
        mul = tuple(tuple((a * b) % q for b in range(q)) for a in range(q))
        return GF(q, q, add, mul)
    if q not in _IRREDUCIBLE:
        raise ValueError(f"unsupported field order {q}")
    c1, c0 = _IRREDUCIBLE[q]
    p = int(q**0.5)

    def enc(a: int, b: int) -> int:
        return a % p + p * (b % p)

    def add_pair(u: int, v: int) -> int:
        return enc(u % p + v % p, u // p + v // p)

    def mul_pair(u: int, v: int) -> int:
        a, b = u % p, u // p
        c, d = v % p, v // p
        # (a+bx)(c+dx) with x^2 = -c1*x - c0
        lo = a * c - b * d * c0
        hi = a * d + b * c - b * d * c1
        return enc(lo, hi)

    add = tuple(tuple(add_pair(u, v) for v in range(q)) for u in range(q))
    mul = tuple(tuple(mul_pair(u, v) for v in range(q)) for u in range(q))
    return GF(q, p, add, mul)
