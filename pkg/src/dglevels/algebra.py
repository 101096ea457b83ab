"""Free graded-commutative / divided-power / polynomial DG algebra presentations.

An algebra is presented by generators (label, positive degree, kind) and a
differential assigned to each generator as a polynomial in the generators.
Monomials are exponent tuples aligned with the generator list; a basis element
with exponent e on a divided-power generator w stands for γ_e(w), so products
carry binomial coefficients reduced in the ground field (making Γ differ from
a polynomial algebra in positive characteristic).

Sign conventions are Koszul throughout: swapping homogeneous factors a, b
costs (-1)^{|a||b|}, and the differential is a degree +1 derivation.
d∘d = 0 is verified symbolically on the generators at construction.

Kinds:
  exterior    exponents capped at 1 (used both for odd generators and for the
              truncated even generator of H*(S^d), d even)
  polynomial  free exponents, derivative rule d(x^e) = e x^{e-1} dx
  divided     free exponents with γ_a γ_b = binom(a+b, a) γ_{a+b} and
              d(γ_e(w)) = dw · γ_{e-1}(w)
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import PresentationError
from .field import FieldTag
from .graded import CochainComplex, DegreeWindow, GradedVectorSpace

EXTERIOR = "exterior"
POLYNOMIAL = "polynomial"
DIVIDED = "divided"
_KINDS = (EXTERIOR, POLYNOMIAL, DIVIDED)


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int
    kind: str = EXTERIOR

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PresentationError(f"unknown generator kind {self.kind!r}")
        if self.degree <= 0:
            raise PresentationError(f"generator {self.label!r} must have positive degree")


class DGAlgebraPresentation:
    """Finitely generated free graded-commutative DG algebra, unit implicit.

    ``differential`` maps generator labels to polynomials; missing labels mean
    zero.  A polynomial is a dict {exponent tuple: scalar}.
    """

    def __init__(self, field: FieldTag, generators, differential=None, char2_polynomial_odd=False):
        self.field = field
        self.generators = tuple(generators)
        labels = [g.label for g in self.generators]
        if len(set(labels)) != len(labels):
            raise PresentationError("duplicate generator labels")
        self.index = {g.label: i for i, g in enumerate(self.generators)}
        for g in self.generators:
            if g.kind != EXTERIOR and g.degree % 2 == 1:
                if not (field.characteristic() == 2 and char2_polynomial_odd):
                    raise PresentationError(
                        f"odd-degree generator {g.label!r} must be exterior "
                        "outside characteristic 2"
                    )
        self.differential = {}
        for label, poly in (differential or {}).items():
            if label not in self.index:
                raise PresentationError(f"differential given for unknown generator {label!r}")
            poly = self.normalize_poly(poly)
            if poly:
                self.differential[label] = poly
        self._basis_cache = {}
        self._validate_differential()

    # -- basic structure -----------------------------------------------------

    @property
    def n(self):
        return len(self.generators)

    def unit_monomial(self):
        return (0,) * self.n

    def generator_monomial(self, label: str):
        m = [0] * self.n
        m[self.index[label]] = 1
        return tuple(m)

    def generator_poly(self, label: str):
        return {self.generator_monomial(label): self.field.one()}

    def monomial_degree(self, mono) -> int:
        return sum(e * g.degree for e, g in zip(mono, self.generators))

    def monomial_parity(self, mono) -> int:
        return sum(e * g.degree for e, g in zip(mono, self.generators)) & 1

    def is_bounded(self) -> bool:
        """True when the monomial basis is finite (all generators exterior)."""
        return all(g.kind == EXTERIOR for g in self.generators)

    def top_degree(self):
        """Largest monomial degree, only meaningful for bounded algebras."""
        return sum(g.degree for g in self.generators) if self.is_bounded() else None

    def is_simply_connected(self) -> bool:
        return all(g.degree >= 2 for g in self.generators)

    def has_zero_differential(self) -> bool:
        return not self.differential

    # -- polynomial arithmetic -------------------------------------------------

    def normalize_poly(self, poly):
        out = {}
        for mono, c in poly.items():
            mono = tuple(mono)
            if len(mono) != self.n:
                raise PresentationError(f"monomial {mono} has wrong arity")
            if not self.field.is_zero(c):
                out[mono] = self.field.add(out.get(mono, self.field.zero()), c) \
                    if mono in out else c
        return {m: c for m, c in out.items() if not self.field.is_zero(c)}

    def poly_add(self, p, q):
        out = dict(p)
        f = self.field
        for m, c in q.items():
            s = f.add(out.get(m, f.zero()), c)
            if f.is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return out

    def poly_scale(self, p, c):
        f = self.field
        if f.is_zero(c):
            return {}
        return {m: f.mul(c, x) for m, x in p.items()}

    def mono_mul(self, m1, m2):
        """Product of monomials: (coefficient, monomial) or None when zero."""
        f = self.field
        coeff = f.one()
        sign = 0
        # Koszul sign: each odd factor of m2 at position j moves left past the
        # odd factors of m1 sitting at positions > j.
        odd1 = [e * (g.degree & 1) for e, g in zip(m1, self.generators)]
        suffix_odd = 0
        for j in range(self.n - 1, -1, -1):
            if m2[j]:
                sign += m2[j] * (self.generators[j].degree & 1) * suffix_odd
            suffix_odd += odd1[j]
        out = []
        for e1, e2, g in zip(m1, m2, self.generators):
            e = e1 + e2
            if g.kind == EXTERIOR and e > 1:
                return None
            if g.kind == DIVIDED and e1 and e2:
                b = f.from_int(comb(e1 + e2, e1))
                if f.is_zero(b):
                    return None
                coeff = f.mul(coeff, b)
            out.append(e)
        if sign & 1:
            coeff = f.neg(coeff)
        return coeff, tuple(out)

    def poly_mul(self, p, q):
        f = self.field
        out = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                r = self.mono_mul(m1, m2)
                if r is None:
                    continue
                coeff, mono = r
                c = f.mul(f.mul(c1, c2), coeff)
                s = f.add(out.get(mono, f.zero()), c)
                if f.is_zero(s):
                    out.pop(mono, None)
                else:
                    out[mono] = s
        return out

    def mono_poly(self, mono):
        return {tuple(mono): self.field.one()}

    # -- differential -----------------------------------------------------------

    def mono_differential(self, mono):
        """The derivation applied to one monomial, as a polynomial."""
        f = self.field
        out = {}
        prefix_parity = 0
        for i, e in enumerate(mono):
            g = self.generators[i]
            if e:
                dg = self.differential.get(g.label)
                if dg:
                    if g.kind == POLYNOMIAL:
                        k = f.from_int(e)
                    else:
                        k = f.one()
                    if not f.is_zero(k):
                        prefix = tuple(mono[j] if j < i else 0 for j in range(self.n))
                        rest = tuple(
                            (e - 1 if j == i else mono[j]) if j >= i else 0
                            for j in range(self.n)
                        )
                        term = self.poly_mul(self.poly_mul(self.mono_poly(prefix), dg),
                                             self.mono_poly(rest))
                        if prefix_parity & 1:
                            term = self.poly_scale(term, f.neg(f.one()))
                        term = self.poly_scale(term, k)
                        out = self.poly_add(out, term)
            prefix_parity += e * (g.degree & 1)
        return out

    def poly_differential(self, poly):
        out = {}
        for mono, c in poly.items():
            out = self.poly_add(out, self.poly_scale(self.mono_differential(mono), c))
        return out

    def poly_degree(self, poly):
        degs = {self.monomial_degree(m) for m in poly}
        if len(degs) > 1:
            raise PresentationError(f"inhomogeneous polynomial of degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def _validate_differential(self):
        for label, poly in self.differential.items():
            g = self.generators[self.index[label]]
            deg = self.poly_degree(poly)
            if deg is not None and deg != g.degree + 1:
                raise PresentationError(
                    f"d({label}) has degree {deg}, expected {g.degree + 1}")
        for label, poly in self.differential.items():
            if self.poly_differential(poly):
                raise PresentationError(f"d∘d ≠ 0 on generator {label!r}")

    # -- basis enumeration and expansion ------------------------------------------

    def monomial_basis(self, hi: int):
        """All monomials of degree <= hi, grouped by degree, sorted."""
        if hi in self._basis_cache:
            return self._basis_cache[hi]
        by_degree = {}

        def extend(i, mono, deg):
            if i == self.n:
                by_degree.setdefault(deg, []).append(tuple(mono))
                return
            g = self.generators[i]
            cap = 1 if g.kind == EXTERIOR else (hi - deg) // g.degree
            for e in range(cap + 1):
                if deg + e * g.degree > hi:
                    break
                mono[i] = e
                extend(i + 1, mono, deg + e * g.degree)
            mono[i] = 0

        extend(0, [0] * self.n, 0)
        for degree in by_degree:
            by_degree[degree].sort()
        self._basis_cache[hi] = by_degree
        return by_degree

    def mono_label(self, mono) -> str:
        parts = []
        for e, g in zip(mono, self.generators):
            if not e:
                continue
            if g.kind == DIVIDED and e > 1:
                parts.append(f"γ{e}({g.label})")
            elif e > 1:
                parts.append(f"{g.label}^{e}")
            else:
                parts.append(g.label)
        return "·".join(parts) if parts else "1"

    def to_complex(self, window: DegreeWindow) -> CochainComplex:
        """Expansion as a cochain complex of the degrees inside the window."""
        by_degree = self.monomial_basis(window.hi)
        degrees = [n for n in sorted(by_degree) if window.contains(n)]
        monos = {n: by_degree[n] for n in degrees}
        space = GradedVectorSpace(
            self.field, {n: [self.mono_label(m) for m in monos[n]] for n in degrees})
        pos = {}
        for n in degrees:
            for j, m in enumerate(monos[n]):
                pos[m] = (n, j)
        diff = {}
        f = self.field
        for n in degrees:
            if n + 1 not in monos:
                continue
            mat = [[f.zero()] * len(monos[n]) for _ in range(len(monos[n + 1]))]
            nonzero = False
            for j, m in enumerate(monos[n]):
                for tm, c in self.mono_differential(m).items():
                    loc = pos.get(tm)
                    if loc is None:
                        continue
                    mat[loc[1]][j] = f.add(mat[loc[1]][j], c)
                    nonzero = True
            if nonzero:
                diff[n] = mat
        truncated = None if self.is_bounded() else window.hi
        return CochainComplex(space, diff, truncated_above=truncated)

    # -- common constructors -------------------------------------------------------

    @staticmethod
    def sphere_cohomology(d: int, field: FieldTag) -> "DGAlgebraPresentation":
        """H*(S^d; K): one generator of degree d squaring to zero, d > 1."""
        if d <= 1:
            raise PresentationError("sphere dimension must exceed 1")
        return DGAlgebraPresentation(field, [Generator(f"x{d}", d, EXTERIOR)])

    @staticmethod
    def polynomial(field: FieldTag, gens, char2_polynomial_odd=False) -> "DGAlgebraPresentation":
        """K[x_1, ..., x_l] with zero differential; gens = [(label, degree)]."""
        return DGAlgebraPresentation(
            field,
            [Generator(label, degree, POLYNOMIAL) for label, degree in gens],
            char2_polynomial_odd=char2_polynomial_odd,
        )

    def sphere_generator_label(self):
        if self.n != 1 or self.generators[0].kind != EXTERIOR:
            return None
        return self.generators[0].label

    # -- serialization ----------------------------------------------------------------

    def poly_to_json(self, poly):
        terms = []
        for mono in sorted(poly):
            exp = {g.label: e for e, g in zip(mono, self.generators) if e}
            terms.append([self.field.scalar_to_json(poly[mono]), exp])
        return terms

    def poly_from_json(self, terms):
        poly = {}
        for coeff, exp in terms:
            mono = [0] * self.n
            for label, e in exp.items():
                mono[self.index[label]] = int(e)
            poly[tuple(mono)] = self.field.scalar_from_json(coeff)
        return self.normalize_poly(poly)

    def to_json(self):
        return {
            "field": str(self.field).lower(),
            "generators": [[g.label, g.degree, g.kind] for g in self.generators],
            "differential": {
                label: self.poly_to_json(poly)
                for label, poly in sorted(self.differential.items())
            },
        }

    @staticmethod
    def from_json(data, char2_polynomial_odd=False):
        from .field import parse_field

        field = parse_field(data["field"])
        gens = [Generator(lbl, int(deg), kind) for lbl, deg, kind in data["generators"]]
        alg = DGAlgebraPresentation(field, gens, char2_polynomial_odd=char2_polynomial_odd)
        diff = {
            label: alg.poly_from_json(terms)
            for label, terms in data.get("differential", {}).items()
        }
        return DGAlgebraPresentation(field, gens, diff,
                                     char2_polynomial_odd=char2_polynomial_odd)
