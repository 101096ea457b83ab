"""Rational free graded-commutative models: sphere models, iterated
odd-sphere extension towers, pile filtrations and the cochain-level Hopf
invariant.

Towers here are Koszul-Sullivan extensions of the sphere model by odd-degree
generators, one spherical fibration per generator.  The tower aimed at level
l is built as follows, with suspension parameter m >= l·d + 1:

  d odd:   base (∧(x), 0); generators w_0, ..., w_{l-1} with D(w_0) = 0 and
           D(w_i) = x·w_{i-1}, deg w_i = i·d + (2m-1) - i.
  d even:  base (∧(x, ξ), δξ = x²); generator ρ with D(ρ) = x, then
           w_0, ..., w_{l-2} with D(w_i) = (ρx - ξ)·w_{i-1},
           deg w_i = i(2d-1) + (2m-1) - i.

Each extension generator is odd, so the fibre complex (tower ⊗_base Q) is a
finite exterior algebra: the total space is a compact object over the base
sphere.  Levels are then bracketed by the generator-depth semifree filtration
(upper bound) and the molecule decomposition of the cohomology (lower bound),
and reported exactly only when the two meet.  Spatial realizations are
metadata: all computation happens on the models.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import DGAlgebraPresentation, EXTERIOR, Generator, POLYNOMIAL
from .errors import (
    MTooSmall,
    NotExact,
    OddDimension,
    PresentationError,
    WindowTooSmall,
    WrongTargetCohomology,
)
from .field import QQ, coordinates, solve
from .graded import DegreeWindow, cohomology
from .module import DGModulePresentation
from .resolve import (
    SemifreeFiltration,
    filtration_class,
    generator_depth_filtration,
    level_upper_bound,
)
from .spheres import LevelResult, _level_from_decomposition, decompose


def sphere_model(d: int) -> DGAlgebraPresentation:
    """Minimal free model of S^d over Q: (∧(x, ξ), δξ = x²) for even d,
    (∧(x), 0) for odd d."""
    if d <= 1:
        raise PresentationError("sphere dimension must exceed 1")
    if d % 2:
        return DGAlgebraPresentation(QQ, [Generator("x", d, EXTERIOR)])
    gens = [Generator("x", d, POLYNOMIAL), Generator("ξ", 2 * d - 1, EXTERIOR)]
    return DGAlgebraPresentation(QQ, gens, {"ξ": {(2, 0): Fraction(1)}})


@dataclass
class TowerSpec:
    """A Koszul-Sullivan extension of the sphere model by odd generators.

    Every extension differential lies in the subalgebra generated by the
    base and the earlier extension generators (checked on construction).
    """

    d: int
    target_level: int
    m: int
    base: DGAlgebraPresentation
    full: DGAlgebraPresentation
    extension: tuple       # ((label, degree), ...) in extension order

    def __post_init__(self):
        base_count = self.full.n - len(self.extension)
        for k, (label, degree) in enumerate(self.extension):
            if degree % 2 == 0:
                raise PresentationError(f"extension generator {label!r} must be odd")
            poly = self.full.differential.get(label, {})
            allowed = base_count + k
            for mono in poly:
                if any(mono[i] for i in range(allowed, self.full.n)):
                    raise PresentationError(
                        f"D({label}) escapes the earlier subalgebra")

    # -- conversions ------------------------------------------------------------

    def as_base_module(self) -> DGModulePresentation:
        """The tower as a free module over the base model, one generator per
        square-free monomial in the extension generators."""
        F = self.full
        nb = F.n - len(self.extension)
        gens = []
        diff = {}
        for mask in range(2 ** len(self.extension)):
            mono = [0] * F.n
            for k in range(len(self.extension)):
                if mask & (1 << k):
                    mono[nb + k] = 1
            label = self._ext_label(mask)
            gens.append((label, F.monomial_degree(tuple(mono))))
            terms = {}
            for tmono, c in F.mono_differential(tuple(mono)).items():
                tmask = 0
                base_part = [0] * nb
                for i in range(nb):
                    base_part[i] = tmono[i]
                for k in range(len(self.extension)):
                    if tmono[nb + k]:
                        tmask |= 1 << k
                # base^α·ext^β = (-1)^{p(α)p(β)} (ext^β)·base^α
                pa = sum(base_part[i] * F.generators[i].degree for i in range(nb)) & 1
                pb = sum(tmono[nb + k] * F.generators[nb + k].degree
                         for k in range(len(self.extension))) & 1
                coeff = QQ.from_int(-1 if pa and pb else 1)
                tlabel = self._ext_label(tmask)
                poly = terms.setdefault(tlabel, {})
                key = tuple(base_part)
                poly[key] = QQ.add(poly.get(key, QQ.zero()), QQ.mul(coeff, c))
            terms = {t: {k: v for k, v in p.items() if not QQ.is_zero(v)}
                     for t, p in terms.items()}
            terms = {t: p for t, p in terms.items() if p}
            if terms:
                diff[label] = terms
        return DGModulePresentation.free(self.base, gens, diff)

    def _ext_label(self, mask):
        parts = [self.extension[k][0] for k in range(len(self.extension))
                 if mask & (1 << k)]
        return "·".join(parts) if parts else "1"

    def fibre_complex(self):
        """Tower ⊗_base Q: the quotient differential keeps only monomials
        free of base generators."""
        F = self.full
        nb = F.n - len(self.extension)
        gens = [Generator(lbl, deg, EXTERIOR) for lbl, deg in self.extension]
        diff = {}
        for lbl, _ in self.extension:
            poly = F.differential.get(lbl, {})
            kept = {}
            for mono, c in poly.items():
                if any(mono[:nb]):
                    continue
                kept[tuple(mono[nb:])] = c
            if kept:
                diff[lbl] = kept
        return DGAlgebraPresentation(QQ, gens, diff)

    def fibre_cohomology_finite(self) -> bool:
        """All quotient generators odd, hence the fibre complex is a finite
        exterior algebra."""
        fib = self.fibre_complex()
        return fib.is_bounded() and all(g.degree % 2 for g in fib.generators)

    def auto_window(self) -> DegreeWindow:
        hi = sum(deg for _, deg in self.extension) + 4 * self.d + 4
        return DegreeWindow(-1, hi)


def build_P_tower(l: int, d: int, m: int | None = None) -> TowerSpec:
    """The tower over S^d aimed at level l; l = 1 is the sphere itself."""
    if l < 1:
        raise PresentationError("the level target must be at least 1")
    if d <= 1:
        raise PresentationError("sphere dimension must exceed 1")
    m = m if m is not None else l * d + 1
    if m < l * d + 1:
        raise MTooSmall(f"suspension parameter m = {m} is below the bound {l * d + 1}")
    base = sphere_model(d)
    if l == 1:
        return TowerSpec(d, 1, m, base, base, ())
    gens = [Generator(g.label, g.degree, g.kind) for g in base.generators]
    diff = {label: dict(poly) for label, poly in base.differential.items()}
    extension = []

    def pad(poly, width):
        return {tuple(mono) + (0,) * (width - len(mono)): c for mono, c in poly.items()}

    if d % 2:
        for i in range(l):
            deg = i * d + (2 * m - 1) - i
            gens.append(Generator(f"w{i}", deg, EXTERIOR))
            extension.append((f"w{i}", deg))
        width = len(gens)
        diff = {label: pad(poly, width) for label, poly in diff.items()}
        for i in range(1, l):
            mono = [0] * width
            mono[0] = 1              # x
            mono[1 + (i - 1)] = 1    # w_{i-1}
            diff[f"w{i}"] = {tuple(mono): Fraction(1)}
    else:
        gens.append(Generator("ρ", d - 1, EXTERIOR))
        extension.append(("ρ", d - 1))
        for i in range(l - 1):
            deg = i * (2 * d - 1) + (2 * m - 1) - i
            gens.append(Generator(f"w{i}", deg, EXTERIOR))
            extension.append((f"w{i}", deg))
        width = len(gens)
        diff = {label: pad(poly, width) for label, poly in diff.items()}
        rho_mono = [0] * width
        rho_mono[0] = 1
        diff["ρ"] = {tuple(rho_mono): Fraction(1)}   # D(ρ) = x
        for i in range(1, l - 1):
            rx = [0] * width
            rx[0] = 1       # x
            rx[2] = 1       # ρ
            rx[3 + (i - 1)] = 1   # w_{i-1}
            xi = [0] * width
            xi[1] = 1       # ξ
            xi[3 + (i - 1)] = 1
            diff[f"w{i}"] = {tuple(rx): Fraction(1), tuple(xi): Fraction(-1)}
    full = DGAlgebraPresentation(QQ, gens, diff)
    return TowerSpec(d, l, m, base, full, tuple(extension))


def tower_level_bounds(tower: TowerSpec, d: int | None = None,
                       window: DegreeWindow | None = None) -> LevelResult:
    """Bracket the level of the tower over its base sphere.

    Upper bound: class of the generator-depth semifree filtration of the
    tower as a base module, plus one.  Lower bound: molecule decomposition of
    the computed cohomology, with matchings above the upper bound pruned.
    Exact exactly when one level survives.
    """
    d = d or tower.d
    window = window or tower.auto_window()
    if not tower.fibre_cohomology_finite():
        raise PresentationError("the fibre complex is not certifiably finite")
    module = tower.as_base_module()
    filt = generator_depth_filtration(module)
    upper = level_upper_bound(filt)
    dims = module.cohomology_dims(window)
    support_top = max((n for n, v in dims.items() if v), default=0)
    if support_top >= window.hi - 2 * d:
        raise WindowTooSmall(
            f"cohomology reaches degree {support_top}; enlarge the window past "
            f"{window.hi}")
    dec = decompose(dims, d)
    return _level_from_decomposition(dec, upper_bound=upper)


# ---------------------------------------------------------------------------
# Pile bounds
# ---------------------------------------------------------------------------


def pile_upper_bound(stages: int, extra_odd_spheres: int = 0, d: int = 3,
                     field=QQ):
    """Level bound c + 1 for a c-stage pile of odd-sphere fibrations over a
    product of the base with extra odd spheres.

    Returns (bound, filtration): the explicit class-c semifree filtration is
    materialized on a witness module and validated, never assumed.
    """
    if stages < 0:
        raise PresentationError("the stage count must be nonnegative")
    A = DGAlgebraPresentation.sphere_cohomology(d, field)
    x = f"x{d}"
    gens = []
    diff = {}
    spheres = [2 * i + 3 for i in range(extra_odd_spheres)]
    for mask in range(2 ** extra_odd_spheres):
        sub = [i for i in range(extra_odd_spheres) if mask & (1 << i)]
        suffix = "".join(f"·y{spheres[i]}" for i in sub)
        sdeg = sum(spheres[i] for i in sub)
        for j in range(stages + 1):
            label = f"e{j}{suffix}"
            gens.append((label, j * (d - 1) + sdeg))
            if j:
                diff[label] = {f"e{j-1}{suffix}": A.generator_poly(x)}
    module = DGModulePresentation.free(A, gens, diff)
    stages_sets = []
    for c in range(stages + 1):
        stages_sets.append(frozenset(lbl for lbl, _ in gens
                                     if int(lbl[1:].split("·")[0]) <= c))
    filt = SemifreeFiltration(module, tuple(stages_sets))
    cls = filtration_class(filt)
    if cls != stages:
        raise PresentationError("pile filtration has unexpected class")
    return stages + 1, filt


def sci_level_bound(codim: int) -> int:
    """Pile bound for a spherically-complete-intersection presentation:
    level over the regular base is at most codim + 1."""
    bound, _ = pile_upper_bound(codim, 0)
    return bound


# ---------------------------------------------------------------------------
# Hopf invariant
# ---------------------------------------------------------------------------


def hopf_invariant(target: DGAlgebraPresentation, gx, gxi=None, d: int = 4,
                   generator_choice="auto", window: DegreeWindow | None = None):
    """Cochain-level Hopf invariant of a map from the sphere model into a
    finite model C with H(C) the cohomology of S^{2d-1}.

    Solve Dρ = g(x) in C, then read the class [ρ·g(x) - g(ξ)] against the
    chosen degree-(2d-1) generator.  The answer does not depend on the choice
    of ρ; that is re-verified by perturbing ρ with a cocycle when one exists.
    """
    field = target.field
    if d % 2:
        return field.zero()
    if d <= 1:
        raise OddDimension("the sphere dimension must exceed 1")
    gx = target.normalize_poly(gx)
    gxi = target.normalize_poly(gxi or {})
    window = window or DegreeWindow(0, 2 * d + 4)
    cx = target.to_complex(window)
    dims, reps = cohomology(cx)
    if dims != {0: 1, 2 * d - 1: 1}:
        raise WrongTargetCohomology(
            f"H(C) = {dims}, expected the S^{2*d-1} pattern")

    basis = target.monomial_basis(window.hi)

    def vec(poly, degree):
        monos = basis.get(degree, [])
        v = [field.zero()] * len(monos)
        for m, c in poly.items():
            v[monos.index(m)] = c
        return v

    gx_vec = vec(gx, d)
    rho = _solve_boundary(cx, d - 1, gx_vec, field)
    if rho is None:
        raise NotExact("g(x) is not a coboundary in the target")

    value = _hopf_value(target, basis, cx, reps, rho, gx, gxi, d,
                        generator_choice, field, window)
    # independence of the choice of ρ: perturb by a cocycle when available
    kernel = _cocycles(cx, d - 1, field)
    for z in kernel[:1]:
        rho2 = tuple(field.add(a, b) for a, b in zip(rho, z))
        value2 = _hopf_value(target, basis, cx, reps, rho2, gx, gxi, d,
                             generator_choice, field, window)
        if value2 != value:
            raise PresentationError("the Hopf invariant depended on the lift")
    return value


def _solve_boundary(cx, degree, rhs, field):
    mat = cx.matrix(degree)
    if not mat:
        return None if any(not field.is_zero(x) for x in rhs) else ()
    return solve(mat, rhs, field)


def _cocycles(cx, degree, field):
    from .field import rank_and_kernel

    mat = cx.matrix(degree)
    if not mat:
        out = []
        for j in range(cx.dim(degree)):
            v = [field.zero()] * cx.dim(degree)
            v[j] = field.one()
            out.append(tuple(v))
        return out
    _, kernel = rank_and_kernel(mat, field)
    return [k for k in kernel if any(not field.is_zero(x) for x in k)]


def _hopf_value(target, basis, cx, reps, rho_vec, gx, gxi, d, generator_choice,
                field, window):
    rho_poly = {}
    for m, c in zip(basis.get(d - 1, []), rho_vec):
        if not field.is_zero(c):
            rho_poly[m] = c
    u = target.poly_add(target.poly_mul(rho_poly, gx),
                        target.poly_scale(gxi, field.from_int(-1)))
    top = 2 * d - 1
    monos = basis.get(top, [])
    u_vec = [field.zero()] * len(monos)
    for m, c in u.items():
        u_vec[monos.index(m)] = c
    if generator_choice == "auto":
        gen_vec = reps[top][0]
    else:
        gen_poly = target.normalize_poly(generator_choice)
        gen_vec = [field.zero()] * len(monos)
        for m, c in gen_poly.items():
            gen_vec[monos.index(m)] = c
    boundaries = []
    mat = cx.differential.get(top - 1)
    if mat is not None:
        for j in range(cx.dim(top - 1)):
            col = tuple(mat[i][j] for i in range(cx.dim(top)))
            if any(not field.is_zero(x) for x in col):
                boundaries.append(col)
    coords = coordinates([tuple(gen_vec)] + boundaries, tuple(u_vec), field)
    if coords is None:
        raise NotExact("the Hopf cocycle is not a class against this generator")
    return coords[0]


def whitehead_square_invariant(d: int) -> int:
    """Hopf invariant of the Whitehead square of the identity, sign-normalized."""
    if d % 2:
        raise OddDimension("the Whitehead square invariant needs even d")
    return 2
