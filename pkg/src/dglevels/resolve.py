"""Semifree resolutions, derived tensor products, Tor, compactness verdicts
and level bounds from filtration class.

A truncated engine must never silently claim finiteness, so every total
cohomology question is answered by a three-way verdict:

  Finite(total, dims)       the tensor complex is fully known (finite free
                            resolution, or finite free module tensored down)
  InfiniteCertified(...)    nonzero cohomology on >= 3 equally spaced degrees
                            reaching the certified horizon, with the spacing
                            equal to the resolution's periodic block degree
  UnknownBeyondCap          everything else

Upper bounds for levels come from finite semifree filtrations: a filtration
of class c certifies level <= c + 1.  Where matching lower bounds exist the
sphere machinery (see spheres.py) turns the bound into an exact value; the
general retract detection problem is out of reach, so elsewhere results stay
intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import DGAlgebraPresentation, POLYNOMIAL
from .errors import (
    InvalidFiltration,
    NotSimplyConnected,
    OddGenerator,
    PresentationError,
    StrategyInapplicable,
)
from .graded import CochainComplex, DegreeWindow, GradedVectorSpace, cohomology
from .module import DGModulePresentation

BAR = "bar"
KOSZUL = "koszul"
GIVEN = "given"


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinitenessVerdict:
    kind: str                      # "finite" | "infinite" | "unknown"
    total: int | None = None
    dims: tuple = ()               # sorted ((degree, dim), ...)
    period: int | None = None
    witnesses: tuple = ()          # >= 3 arithmetic-progression degrees

    @property
    def is_finite(self):
        return self.kind == "finite"

    @property
    def is_infinite(self):
        return self.kind == "infinite"

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "finite":
            out["total"] = self.total
            out["dims"] = {str(n): d for n, d in self.dims}
        if self.kind == "infinite":
            out["period"] = self.period
            out["witnesses"] = list(self.witnesses)
        return out


def finite_verdict(dims):
    items = tuple(sorted((n, d) for n, d in dims.items() if d))
    return FinitenessVerdict("finite", total=sum(d for _, d in items), dims=items)


def infinite_verdict(period, witnesses):
    if len(witnesses) < 3:
        raise PresentationError("an infinite certificate needs at least 3 witnesses")
    return FinitenessVerdict("infinite", period=period, witnesses=tuple(witnesses))


UNKNOWN = FinitenessVerdict("unknown")


def periodic_witnesses(dims, period, horizon):
    """Arithmetic progression of nonzero degrees with the given period that
    runs all the way to the certified horizon; None when absent."""
    if period is None or period <= 0:
        return None
    nonzero = sorted(n for n, d in dims.items() if d)
    for start in nonzero:
        ws = []
        n = start
        while n <= horizon and dims.get(n):
            ws.append(n)
            n += period
        if len(ws) >= 3 and ws[-1] + period > horizon:
            return tuple(ws)
    return None


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------


@dataclass
class Resolution:
    """A semifree module with an augmentation to the resolved module."""

    module: DGModulePresentation
    period: int | None = None      # degree of the repeating block, if any
    description: str = ""

    @property
    def bounded(self):
        return self.module.truncation_degree is None


def sphere_block_period(d: int) -> int:
    """Degree of the repeating divided-power block over H*(S^d)."""
    return 2 * (d - 1) if d % 2 == 0 else d - 1


def koszul_resolution_sphere(d: int, field, cap: int | None = None,
                             window: DegreeWindow | None = None) -> Resolution:
    """Semifree resolution of K over A = H*(S^d).

    d even: generators γ_i(w) and γ_i(w)·s⁻¹x with D(γ_i(w)) = γ_{i-1}(w)s⁻¹x · x
    and D(γ_i(w)s⁻¹x) = γ_i(w) · x; a single chain of x-multiplications.
    d odd: generators γ_i(s⁻¹x) with D(γ_i) = γ_{i-1} · x.
    Generators are produced through degree ``cap``; the stored differentials
    are complete (they point down the chain), only high generators are absent.
    """
    window = window or DegreeWindow(0, 40)
    cap = cap if cap is not None else window.hi + d + 2
    A = DGAlgebraPresentation.sphere_cohomology(d, field)
    x = f"x{d}"
    gens = []
    diff = {}
    if d % 2 == 0:
        block = 2 * d - 2
        i = 0
        prev = None
        while i * block <= cap:
            g0 = f"γ{i}(w)" if i else "1̄"
            gens.append((g0, i * block))
            if prev is not None:
                diff[g0] = {prev: A.generator_poly(x)}
            g1 = f"γ{i}(w)·s⁻¹{x}" if i else f"s⁻¹{x}"
            if i * block + d - 1 <= cap:
                gens.append((g1, i * block + d - 1))
                diff[g1] = {g0: A.generator_poly(x)}
                prev = g1
            else:
                prev = None
            i += 1
    else:
        block = d - 1
        i = 0
        while i * block <= cap:
            g = f"γ{i}(s⁻¹{x})" if i else "1̄"
            gens.append((g, i * block))
            if i:
                prevlbl = f"γ{i-1}(s⁻¹{x})" if i > 1 else "1̄"
                diff[g] = {prevlbl: A.generator_poly(x)}
            i += 1
    mod = DGModulePresentation.free(A, gens, diff, truncation_degree=cap + 1)
    return Resolution(mod, period=sphere_block_period(d),
                      description=f"Koszul resolution of K over H*(S^{d})")


def koszul_resolution_poly(degrees, field, labels=None,
                           char2_odd_ok: bool | None = None) -> Resolution:
    """Koszul complex resolving K over K[x_1, ..., x_l]: exterior generators
    s⁻¹x_j with D(s⁻¹x_j) = x_j.  Finite and fully known."""
    degrees = list(degrees)
    char2 = field.characteristic() == 2
    if any(dd % 2 for dd in degrees) and not char2:
        raise OddGenerator("polynomial generators must have even degree outside char 2")
    labels = labels or [f"x{i+1}" for i in range(len(degrees))]
    A = DGAlgebraPresentation.polynomial(field, list(zip(labels, degrees)),
                                         char2_polynomial_odd=char2)
    gens = []
    diff = {}
    for mask in range(2 ** len(degrees)):
        subset = [j for j in range(len(degrees)) if mask & (1 << j)]
        label = _koszul_label(subset, labels)
        deg = sum(degrees[j] - 1 for j in subset)
        gens.append((label, deg))
        terms = {}
        sign = 1
        for idx, j in enumerate(subset):
            rest = subset[:idx] + subset[idx + 1:]
            prefix_parity = sum((degrees[t] - 1) for t in subset[:idx]) % 2
            coeff = field.from_int(-1 if prefix_parity else 1)
            terms[_koszul_label(rest, labels)] = A.poly_scale(A.generator_poly(labels[j]), coeff)
        if terms:
            diff[label] = terms
    mod = DGModulePresentation.free(A, gens, diff)
    return Resolution(mod, period=None,
                      description=f"Koszul complex over {field}[{', '.join(labels)}]")


def _koszul_label(subset, labels):
    if not subset:
        return "1̄"
    return "·".join(f"s⁻¹{labels[j]}" for j in subset)


def bar_resolution(module: DGModulePresentation, algebra: DGAlgebraPresentation = None,
                   cutoff: int | None = None, window: DegreeWindow | None = None) -> Resolution:
    """The bar resolution B(M; A; A), truncated at the given bar length.

    Generators are m[a_1|...|a_t] with m a basis element of (an expansion of)
    M and a_i positive-degree algebra basis monomials; the generator degree is
    deg m + Σ(deg a_i - 1), so the bar-length-t part sits in degrees >= t and
    truncation is sound below the cutoff.
    """
    algebra = algebra or module.algebra
    if not algebra.is_simply_connected():
        raise NotSimplyConnected("bar resolution needs generators in degrees >= 2")
    window = window or DegreeWindow(0, 24)
    cap = window.hi + 2
    cutoff = cutoff if cutoff is not None else cap
    f = algebra.field
    mexp = module.expand(DegreeWindow(min(0, window.lo), cap + 1))
    m_elems = []
    for n in sorted(mexp.elements):
        for e in mexp.elements[n]:
            m_elems.append((e, n))
    slot_basis = []
    for deg, monos in sorted(algebra.monomial_basis(cap + 1).items()):
        if deg == 0:
            continue
        for m in monos:
            slot_basis.append((m, deg))

    gens = []
    diff = {}
    gen_label = {}

    def label_of(elem, slots):
        mlabel = _module_elem_label(mexp, elem)
        if not slots:
            return mlabel
        inner = "|".join(algebra.mono_label(s) for s in slots)
        return f"{mlabel}[{inner}]"

    # enumerate (m, slots) with total degree <= cap and bar length <= cutoff
    stack = [((), 0)]
    all_words = []
    while stack:
        slots, sdeg = stack.pop()
        all_words.append((slots, sdeg))
        if len(slots) >= cutoff:
            continue
        for mono, mdeg in slot_basis:
            nd = sdeg + mdeg - 1
            if nd <= cap:
                stack.append((slots + (mono,), nd))
    all_words.sort(key=lambda w: (len(w[0]), w[0]))

    for elem, mdeg in m_elems:
        for slots, sdeg in all_words:
            total = mdeg + sdeg
            if total > cap:
                continue
            lbl = label_of(elem, slots)
            gens.append((lbl, total))
            gen_label[(elem, slots)] = lbl

    for elem, mdeg in m_elems:
        for slots, sdeg in all_words:
            if mdeg + sdeg > cap:
                continue
            src = gen_label[(elem, slots)]
            terms = {}

            def add(target_key, poly):
                tgt = gen_label.get(target_key)
                if tgt is None:
                    return
                terms[tgt] = algebra.poly_add(terms.get(tgt, {}), poly)

            unit = algebra.unit_monomial()
            eps = [mdeg]
            for s in slots:
                eps.append(eps[-1] + algebra.monomial_degree(s) - 1)

            # internal differential of m
            dm = mexp.complex.apply(mexp.pos[elem][0],
                                    _unit_vector(mexp, elem))
            for i, c in enumerate(dm):
                if not f.is_zero(c):
                    tgt_elem = mexp.elements[mdeg + 1][i]
                    add((tgt_elem, slots), {unit: c})
            # internal differentials of the slots
            for i, s in enumerate(slots):
                ds = algebra.mono_differential(s)
                for tm, c in ds.items():
                    sign = f.from_int(-1 if eps[i] % 2 else 1)
                    add((elem, slots[:i] + (tm,) + slots[i + 1:]),
                        {unit: f.neg(f.mul(sign, c))})
            if slots:
                # merge m with the first slot
                sign0 = f.from_int(-1 if mdeg % 2 else 1)
                acted = mexp.act_element(elem, algebra.mono_poly(slots[0]))
                for tgt_elem, c in acted.items():
                    add((tgt_elem, slots[1:]), {unit: f.mul(sign0, c)})
                # merge adjacent slots; the sign uses the prefix through the
                # left slot (suspended degrees)
                for i in range(1, len(slots)):
                    prod = algebra.mono_mul(slots[i - 1], slots[i])
                    if prod is None:
                        continue
                    c, mono = prod
                    sign = f.from_int(-1 if eps[i] % 2 else 1)
                    add((elem, slots[:i - 1] + (mono,) + slots[i + 1:]),
                        {unit: f.mul(sign, c)})
                # last slot becomes an algebra coefficient
                signt = f.from_int(-1 if eps[-2] % 2 else 1)
                add((elem, slots[:-1]),
                    algebra.poly_scale({slots[-1]: f.one()}, f.neg(signt)))
            if terms:
                diff[src] = {t: p for t, p in terms.items() if p}

    mod = DGModulePresentation.free(algebra, gens,
                                    {s: t for s, t in diff.items() if t},
                                    truncation_degree=cap + 1)
    return Resolution(mod, period=None, description="bar resolution")


def _module_elem_label(mexp, elem):
    if mexp.module.is_free:
        g, m = elem
        ml = mexp.module.algebra.mono_label(m)
        return g if ml == "1" else f"{g}·{ml}"
    n, j = elem
    return mexp.module.complex.space.labels(n)[j]


def _unit_vector(mexp, elem):
    n, j = mexp.pos[elem]
    f = mexp.field
    v = [f.zero()] * len(mexp.elements[n])
    v[j] = f.one()
    return v


def bar_length_filtration(resolution: Resolution) -> "SemifreeFiltration":
    """Filtration of a bar resolution by bar length (valid over algebras with
    zero differential resolving a zero-differential module)."""
    stages = {}
    for label, _ in resolution.module.generators:
        t = label.count("|") + (1 if "[" in label else 0)
        stages.setdefault(t, set()).add(label)
    cumulative = []
    acc = set()
    for t in sorted(stages):
        acc |= stages[t]
        cumulative.append(frozenset(acc))
    return SemifreeFiltration(resolution.module, tuple(cumulative))


# ---------------------------------------------------------------------------
# Derived tensor products
# ---------------------------------------------------------------------------


@dataclass
class TorResult:
    complex: CochainComplex
    dims: dict
    certified_hi: int
    period: int | None
    bounded: bool
    strategy: str

    def verdict(self) -> FinitenessVerdict:
        if self.bounded:
            return finite_verdict(self.dims)
        ws = periodic_witnesses(self.dims, self.period, self.certified_hi)
        if ws:
            return infinite_verdict(self.period, ws)
        return UNKNOWN


def _resolve(M: DGModulePresentation, strategy: str, window: DegreeWindow) -> Resolution:
    A = M.algebra
    if strategy == GIVEN:
        if not M.is_free:
            raise StrategyInapplicable("GivenResolution needs a free presentation")
        return Resolution(M, period=None, description="module is already semifree")
    if strategy == KOSZUL:
        if not A.has_zero_differential():
            raise StrategyInapplicable("Koszul strategy needs a zero-differential algebra")
        if M.is_free:
            return Resolution(M, period=None, description="free module")
        if not M.is_trivial():
            raise StrategyInapplicable(
                "Koszul strategy resolves trivial modules (sums of shifts of K)")
        shifts = M.shift_degrees()
        d_label = A.sphere_generator_label()
        if d_label is not None:
            d = A.generators[0].degree
            base = koszul_resolution_sphere(d, A.field, cap=window.hi + d + 2)
        elif all(g.kind == POLYNOMIAL for g in A.generators):
            base = koszul_resolution_poly([g.degree for g in A.generators], A.field,
                                          labels=[g.label for g in A.generators])
        else:
            raise StrategyInapplicable("no Koszul pattern for this algebra")
        return _shifted_sum(base, shifts, A)
    if strategy == BAR:
        return bar_resolution(M, A, window=window)
    raise StrategyInapplicable(f"unknown strategy {strategy!r}")


def _shifted_sum(base: Resolution, shifts, A) -> Resolution:
    f = A.field
    if not shifts:
        return Resolution(DGModulePresentation.zero(A), period=None,
                          description="zero module")
    gens = []
    diff = {}
    for k, s in enumerate(sorted(shifts)):
        sign = f.from_int(-1 if s % 2 else 1)
        for lbl, deg in base.module.generators:
            gens.append((f"{k}⟨{s}⟩·{lbl}", deg + s))
        for src, terms in base.module.differential.items():
            diff[f"{k}⟨{s}⟩·{src}"] = {
                f"{k}⟨{s}⟩·{t}": A.poly_scale(p, sign) for t, p in terms.items()
            }
    trunc = base.module.truncation_degree
    if trunc is not None:
        trunc = trunc + min(shifts) if shifts else trunc
    mod = DGModulePresentation.free(A, gens, diff, truncation_degree=trunc)
    return Resolution(mod, period=base.period, description=base.description + " (shifted sum)")


def residue_module(A: DGAlgebraPresentation) -> DGModulePresentation:
    """K with the augmentation action."""
    return DGModulePresentation.trivial(A)


def derived_tensor(M: DGModulePresentation, N: DGModulePresentation,
                   strategy: str = BAR, window: DegreeWindow | None = None) -> TorResult:
    """M ⊗^L_A N as a cochain complex; its cohomology is Tor_A(M, N) in every
    certified degree.  N is a bounded module presented with right actions and
    used on the left through graded commutativity."""
    window = window or DegreeWindow(0, 24)
    res = _resolve(M, strategy, window)
    F = res.module
    A = M.algebra
    f = A.field
    nexp = N.expand(N.default_window())
    n_degrees = sorted(nexp.elements)
    if not n_degrees:
        space = GradedVectorSpace(f, {})
        cx = CochainComplex(space, {})
        return TorResult(cx, {}, window.hi, res.period, True, strategy)
    n_lo = min(n_degrees)

    elems = {}
    for glabel, gdeg in F.generators:
        for nd in n_degrees:
            for j, ne in enumerate(nexp.elements[nd]):
                total = gdeg + nd
                if window.lo <= total <= window.hi + 1:
                    elems.setdefault(total, []).append((glabel, gdeg, ne))
    for n in elems:
        elems[n].sort(key=lambda e: (e[0], str(e[2])))
    pos = {}
    labels = {}
    for n, es in elems.items():
        labels[n] = []
        for jj, (glabel, gdeg, ne) in enumerate(es):
            pos[(glabel, ne)] = (n, jj)
            labels[n].append(f"{glabel}⊗{_module_elem_label(nexp, ne)}")
    space = GradedVectorSpace(f, labels)

    diff = {}
    for n, es in sorted(elems.items()):
        tgt = elems.get(n + 1, [])
        if not tgt:
            continue
        mat = [[f.zero()] * len(es) for _ in range(len(tgt))]
        nonzero = False
        for j, (glabel, gdeg, ne) in enumerate(es):
            # D_F part: D(g) = Σ h·a ; (h·a)⊗b = h⊗(a·b), left action via
            # graded commutativity a·b = (-1)^{|a||b|} b·a
            for h, a in F.differential.get(glabel, {}).items():
                bparity = (nexp.pos[ne][0]) % 2
                for am, ac in a.items():
                    aparity = A.monomial_degree(am) % 2
                    sgn = f.from_int(-1 if (aparity and bparity) else 1)
                    for tgt_ne, c in nexp.act_element(ne, {am: ac}).items():
                        loc = pos.get((h, tgt_ne))
                        if loc and loc[0] == n + 1:
                            mat[loc[1]][j] = f.add(mat[loc[1]][j], f.mul(sgn, c))
                            nonzero = True
            # N-differential part with the Koszul sign of |g|
            nd = nexp.pos[ne][0]
            image = nexp.complex.apply(nd, _unit_vector(nexp, ne))
            sgn = f.from_int(-1 if gdeg % 2 else 1)
            for i, c in enumerate(image):
                if f.is_zero(c):
                    continue
                loc = pos.get((glabel, nexp.elements[nd + 1][i]))
                if loc and loc[0] == n + 1:
                    mat[loc[1]][j] = f.add(mat[loc[1]][j], f.mul(sgn, c))
                    nonzero = True
        if nonzero:
            diff[n] = mat

    if F.truncation_degree is None:
        truncated_above = None
        bounded = True
    else:
        truncated_above = F.truncation_degree - 1 + n_lo
        bounded = False
    cx = CochainComplex(space, diff, truncated_above=truncated_above)
    dims, _ = cohomology(cx, window)
    cert_hi = window.hi
    if truncated_above is not None:
        cert_hi = min(cert_hi, truncated_above - 2)
    dims = {n: d for n, d in dims.items() if n <= cert_hi}
    return TorResult(cx, dims, cert_hi, res.period, bounded, strategy)


# ---------------------------------------------------------------------------
# phi, compactness, level certificates
# ---------------------------------------------------------------------------


def auto_strategy(M: DGModulePresentation) -> str:
    if M.is_free:
        return GIVEN
    A = M.algebra
    if M.is_trivial() and A.has_zero_differential():
        label_ok = A.sphere_generator_label() is not None or \
            all(g.kind == POLYNOMIAL for g in A.generators)
        if label_ok:
            return KOSZUL
    return BAR


def phi(M: DGModulePresentation, window: DegreeWindow | None = None,
        strategy: str | None = None) -> FinitenessVerdict:
    """dim H(M ⊗^L_A K) as a verdict."""
    A = M.algebra
    if not A.is_simply_connected():
        raise NotSimplyConnected("phi needs a simply-connected algebra")
    window = window or _phi_window(M)
    strategy = strategy or auto_strategy(M)
    tor = derived_tensor(M, residue_module(A), strategy=strategy, window=window)
    return tor.verdict()


def _phi_window(M):
    if M.is_free and M.generators:
        degs = [d for _, d in M.generators]
        return DegreeWindow(min(degs + [0]) - 1, max(degs) + 2)
    if not M.is_free:
        degs = M.complex.space.degrees() or [0]
        span = max(degs) - min(degs)
        base = max(degs) + 4 * (span + 4)
        return DegreeWindow(min(degs) - 1, base)
    return DegreeWindow(-1, 8)


def is_compact(M: DGModulePresentation, window: DegreeWindow | None = None):
    """(True/False/None, verdict): None when the verdict is unknown."""
    v = phi(M, window)
    if v.is_finite:
        return True, v
    if v.is_infinite:
        return False, v
    return None, v


def infinite_level_certificate(obj, algebra: DGAlgebraPresentation | None = None):
    """The infinite-cohomology witness behind "level = ∞".

    When the base algebra has finite-dimensional cohomology, any object built
    from it in finitely many steps has finite-dimensional cohomology; so a
    certified infinite H(M) certifies level_A(M) = ∞.  Accepts a TorResult or
    a module; returns a FinitenessVerdict with kind "infinite", or None.
    """
    if isinstance(obj, TorResult):
        A = algebra
        if A is not None and not A.is_bounded():
            raise PresentationError("the certificate needs dim H(A) < ∞")
        v = obj.verdict()
        return v if v.is_infinite else None
    M = obj
    if not M.algebra.is_bounded():
        raise PresentationError("the certificate needs dim H(A) < ∞")
    return None  # finite presentations over bounded algebras have bounded H


# ---------------------------------------------------------------------------
# Semifree filtrations
# ---------------------------------------------------------------------------


@dataclass
class SemifreeFiltration:
    """Nested generator subsets F^0 ⊆ F^1 ⊆ ... ⊆ F^c = all generators.

    Validity: the differential of each stage-n generator lies in the span of
    stage n-1 generators over the algebra, so every subquotient is a direct
    sum of shifts of the algebra.
    """

    module: DGModulePresentation
    stages: tuple

    def validate(self):
        if not self.module.is_free:
            raise InvalidFiltration("filtrations live on free presentations")
        all_gens = set(l for l, _ in self.module.generators)
        prev = frozenset()
        for i, stage in enumerate(self.stages):
            stage = frozenset(stage)
            if not prev <= stage:
                raise InvalidFiltration(f"stage {i} does not contain stage {i-1}")
            for g in stage - prev:
                for target in self.module.differential.get(g, {}):
                    if target not in prev:
                        raise InvalidFiltration(
                            f"differential of {g!r} escapes stage {i-1} (hits {target!r})")
            prev = stage
        if prev != frozenset(all_gens):
            raise InvalidFiltration("final stage must contain every generator")


def filtration_class(filtration: SemifreeFiltration) -> int:
    filtration.validate()
    all_gens = frozenset(l for l, _ in filtration.module.generators)
    for i, stage in enumerate(filtration.stages):
        if frozenset(stage) == all_gens:
            return i
    raise InvalidFiltration("no stage contains every generator")


def level_upper_bound(filtration: SemifreeFiltration) -> int:
    return filtration_class(filtration) + 1


def generator_depth_filtration(module: DGModulePresentation) -> SemifreeFiltration:
    """Greedy stage assignment: depth(g) = 1 + max depth over the generators
    appearing in D(g).  Always valid; gives the minimal class achievable
    without change of basis."""
    if not module.is_free:
        raise InvalidFiltration("depth filtration needs a free presentation")
    depth = {}

    def compute(g, trail):
        if g in depth:
            return depth[g]
        if g in trail:
            raise InvalidFiltration("differential dependency cycle")
        targets = module.differential.get(g, {})
        if not targets:
            depth[g] = 0
            return 0
        d = 1 + max(compute(t, trail | {g}) for t in targets)
        depth[g] = d
        return d

    for g, _ in module.generators:
        compute(g, frozenset())
    top = max(depth.values(), default=0)
    stages = []
    for c in range(top + 1):
        stages.append(frozenset(g for g, _ in module.generators if depth[g] <= c))
    if not stages:
        stages = [frozenset()]
    return SemifreeFiltration(module, tuple(stages))
