"""Exact scalar arithmetic over the rationals and prime fields.

Scalars are plain Python values: ``fractions.Fraction`` over the rationals
(always stored reduced with positive denominator) and ints in ``[0, p)`` over
a prime field.  A :class:`FieldTag` carries the choice of field and provides
the arithmetic; no floating point appears anywhere.

Row reduction over the rationals rescales each working row to a primitive
integer vector before it is used for elimination, which keeps numerators and
denominators from blowing up on desk-scale matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DivisionByZero, FieldMismatch


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldTag:
    """Ground field: ``p == 0`` means the rationals, otherwise F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0:
            if self.p >= 2**31 or not _is_prime(self.p):
                raise FieldMismatch(f"modulus {self.p} is not a prime below 2^31")

    # -- classification ----------------------------------------------------

    def characteristic(self) -> int:
        return self.p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __str__(self):
        return "Q" if self.p == 0 else f"F{self.p}"

    # -- element construction ----------------------------------------------

    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def from_int(self, n: int):
        return Fraction(n) if self.p == 0 else n % self.p

    def from_fraction(self, num: int, den: int = 1):
        if self.p == 0:
            return Fraction(num, den)
        if den % self.p == 0:
            raise DivisionByZero(f"denominator {den} is zero mod {self.p}")
        return (num * pow(den, -1, self.p)) % self.p

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        return a + b if self.p == 0 else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p == 0 else (a - b) % self.p

    def neg(self, a):
        return -a if self.p == 0 else (-a) % self.p

    def mul(self, a, b):
        return a * b if self.p == 0 else (a * b) % self.p

    def inv(self, a):
        if self.is_zero(a):
            raise DivisionByZero("inverse of zero")
        return 1 / Fraction(a) if self.p == 0 else pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    # -- serialization -------------------------------------------------------

    def scalar_to_json(self, a):
        """Rationals serialize as "num/den" strings, residues as ints."""
        if self.p == 0:
            f = Fraction(a)
            return f"{f.numerator}/{f.denominator}"
        return int(a)

    def scalar_from_json(self, v):
        if self.p == 0:
            if isinstance(v, str):
                if "/" in v:
                    num, den = v.split("/", 1)
                    return Fraction(int(num), int(den))
                return Fraction(int(v))
            if isinstance(v, int):
                return Fraction(v)
            raise FieldMismatch(f"cannot read rational scalar from {v!r}")
        if isinstance(v, str):
            return self.from_fraction(*map(int, v.split("/"))) if "/" in v else self.from_int(int(v))
        if isinstance(v, int):
            return self.from_int(v)
        raise FieldMismatch(f"cannot read mod-{self.p} scalar from {v!r}")


QQ = FieldTag(0)
GF2 = FieldTag(2)
GF3 = FieldTag(3)
GF5 = FieldTag(5)


def parse_field(name: str) -> FieldTag:
    """Parse CLI field names: "q" or "f<p>"."""
    name = name.strip().lower()
    if name in ("q", "qq", "rational", "rationals"):
        return QQ
    if name.startswith("f") and name[1:].isdigit():
        return FieldTag(int(name[1:]))
    raise FieldMismatch(f"unknown field {name!r} (expected q or f<prime>)")


def arith(field: FieldTag, a, b, op: str):
    """Single-entry arithmetic dispatcher. ``inv`` and ``neg`` ignore ``b``."""
    if op == "add":
        return field.add(a, b)
    if op == "mul":
        return field.mul(a, b)
    if op == "neg":
        return field.neg(a)
    if op == "inv":
        return field.inv(a)
    raise FieldMismatch(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Exact linear algebra
# ---------------------------------------------------------------------------


def _validate_entries(rows, field):
    want = Fraction if field.p == 0 else int
    for row in rows:
        for x in row:
            if field.p == 0:
                if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
                    raise FieldMismatch(f"entry {x!r} is not a rational scalar")
            else:
                if isinstance(x, Fraction) and x.denominator != 1:
                    raise FieldMismatch(f"entry {x!r} is not a mod-{field.p} residue")
                if not isinstance(x, (int, Fraction)):
                    raise FieldMismatch(f"entry {x!r} is not a mod-{field.p} residue")
    return want


def _primitive(row):
    """Rescale a rational row to a primitive integer vector (sign preserved)."""
    den = 1
    for x in row:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return [Fraction(v) for v in ints]


def row_reduce(rows, field: FieldTag):
    """Reduced row echelon form. Returns (rref rows, pivot column list).

    The input is not modified.  Over Q each new pivot row is rescaled to a
    primitive integer vector before elimination (fraction-free growth
    control); pivots are normalized to 1 at the end.
    """
    _validate_entries(rows, field)
    if field.p == 0:
        m = [[Fraction(x) for x in row] for row in rows]
    else:
        m = [[int(x) % field.p for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not field.is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        if field.p == 0:
            m[r] = _primitive(m[r])
        inv_p = field.inv(m[r][c])
        m[r] = [field.mul(inv_p, x) for x in m[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [field.sub(m[i][j], field.mul(f, m[r][j])) for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def rank_and_kernel(rows, field: FieldTag):
    """Rank of the matrix and a basis of its right kernel.

    Rows are equations: a kernel vector v satisfies (rows) . v = 0.
    Kernel vectors are indexed by free columns in increasing order, with a 1
    in the free coordinate.
    """
    if not rows or not rows[0]:
        ncols = len(rows[0]) if rows else 0
        basis = []
        for j in range(ncols):
            v = [field.zero()] * ncols
            v[j] = field.one()
            basis.append(tuple(v))
        return 0, basis
    rref, pivots = row_reduce(rows, field)
    ncols = len(rows[0])
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [field.zero()] * ncols
        v[free] = field.one()
        for r, p in enumerate(pivots):
            v[p] = field.neg(rref[r][free])
        basis.append(tuple(v))
    return len(pivots), basis


def rank(rows, field: FieldTag) -> int:
    if not rows or not rows[0]:
        return 0
    return len(row_reduce(rows, field)[1])


def solve(rows, rhs, field: FieldTag):
    """One solution x of (rows) . x = rhs, or None when inconsistent.

    Free coordinates are set to zero, so the result is deterministic.
    """
    if not rows:
        return None if any(not field.is_zero(b) for b in rhs) else ()
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    rref, pivots = row_reduce(aug, field)
    x = [field.zero()] * ncols
    for r, p in enumerate(pivots):
        if p == ncols:
            return None
        x[p] = rref[r][ncols]
    return tuple(x)


def in_span(vectors, target, field: FieldTag):
    """Whether target lies in the span of the given vectors (all same length)."""
    if not vectors:
        return all(field.is_zero(t) for t in target)
    cols = list(vectors)
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(target))]
    return solve(rows, list(target), field) is not None


def coordinates(vectors, target, field: FieldTag):
    """Coordinates of target in the span of ``vectors``, or None."""
    if not vectors:
        return () if all(field.is_zero(t) for t in target) else None
    rows = [[vectors[j][i] for j in range(len(vectors))] for i in range(len(target))]
    return solve(rows, list(target), field)
