"""Eilenberg-Moore spectral sequence for pullbacks over a sphere.

The second page for a fibre square over S^d with the path-loop fibration on
one side is the Koszul-resolution Tor: for d even the column algebra is
∧(s⁻¹x_d) ⊗ Γ[τ] with bideg s⁻¹x_d = (-1, d) and bideg τ = (-2, 2d); for d
odd it is Γ[s⁻¹x_d].  The only differential carrying information is d₂,
driven by the Hopf invariant: d₂(τ) = h·x_{2d-1} propagates through the
divided-power comodule structure as d₂(γ_i(τ)) = h·x_{2d-1}·γ_{i-1}(τ),
extended multiplicatively over ∧(s⁻¹x_d) and linearly over the remaining
tensor factors.  Everything beyond d₂ must die for bidegree reasons; the
certification re-proves that by arithmetic on the nonzero cells instead of
prose.

Convergence caveat: E∞ dimensions are associated-graded dimensions.  The
result flags "no extension problem" only when each total degree carries at
most one nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CannotCertifyCollapse,
    OddDimensionNonzeroHopf,
    PresentationError,
    WindowTooSmall,
)
from .field import FieldTag, rank
from .graded import DegreeWindow
from .resolve import (
    FinitenessVerdict,
    finite_verdict,
    infinite_verdict,
    periodic_witnesses,
    sphere_block_period,
    UNKNOWN,
)


@dataclass(frozen=True)
class FibreSquareSpec:
    """Pullback of the path-loop fibration over S^d along a map from a space
    with the given cohomology dimensions; ``hopf`` is the image of the Hopf
    invariant in the field.  ``extra_dims`` tensors in the cohomology of an
    extra fibre direction (used for iterated pullbacks)."""

    d: int
    top_dims: tuple          # sorted ((degree, dim), ...)
    hopf: object
    field: FieldTag
    extra_dims: tuple = ()

    @staticmethod
    def make(d, top_dims, hopf, field, extra_dims=None):
        if d <= 1:
            raise PresentationError("base sphere dimension must exceed 1")
        top = tuple(sorted((n, v) for n, v in dict(top_dims).items() if v)) \
            if top_dims else ((0, 1),)
        extra = tuple(sorted((n, v) for n, v in dict(extra_dims).items() if v)) \
            if extra_dims else ()
        return FibreSquareSpec(d, top, field.from_int(hopf) if isinstance(hopf, int)
                               else hopf, field, extra)


class BigradedPage:
    """One page: cells keyed by (s <= 0, t >= 0) holding labeled basis
    elements; d_r has bidegree (r, 1-r)."""

    def __init__(self, spec: FibreSquareSpec, window: DegreeWindow):
        self.spec = spec
        self.field = spec.field
        self.window = window
        self.page_index = 2
        self.d2 = None
        d = spec.d
        self.even = d % 2 == 0
        top = _expand(spec.top_dims, "x")
        extra = _expand(spec.extra_dims, "e") if spec.extra_dims else [((0, 0), "1", 0)]
        cells = {}
        if self.even:
            gamma_cap = max(0, (window.hi) // (2 * d - 2) + 1)
            for (tdeg, tidx), tlabel, _ in top:
                for eps in (0, 1):
                    for i in range(gamma_cap + 1):
                        for (edeg, eidx), elabel, _ in extra:
                            s = -eps - 2 * i
                            t = tdeg + eps * d + 2 * i * d + edeg
                            if t - (-s) > window.hi or t < 0:
                                continue
                            key = (tdeg, tidx, eps, i, edeg, eidx)
                            label = _cell_label(tlabel, eps, i, elabel, d, even=True)
                            cells.setdefault((s, t), []).append((key, label))
        else:
            gamma_cap = max(0, window.hi // (d - 1) + 1)
            for (tdeg, tidx), tlabel, _ in top:
                for i in range(gamma_cap + 1):
                    for (edeg, eidx), elabel, _ in extra:
                        s = -i
                        t = tdeg + i * d + edeg
                        if t - i > window.hi or t < 0:
                            continue
                        key = (tdeg, tidx, 0, i, edeg, eidx)
                        label = _cell_label(tlabel, 0, i, elabel, d, even=False)
                        cells.setdefault((s, t), []).append((key, label))
        self.cells = {st: sorted(v) for st, v in cells.items()}
        self.index = {}
        for st, elems in self.cells.items():
            for j, (key, _) in enumerate(elems):
                self.index[key] = (st, j)

    # -- structure ----------------------------------------------------------

    def entries(self):
        return {st: tuple(lbl for _, lbl in elems) for st, elems in self.cells.items()}

    def cell_dim(self, st):
        return len(self.cells.get(st, ()))

    def total_degree_dims(self):
        out = {}
        for (s, t), elems in self.cells.items():
            out[s + t] = out.get(s + t, 0) + len(elems)
        return out

    @property
    def top_sphere_degree(self):
        degs = [n for n, _ in self.spec.top_dims if n > 0]
        return degs[0] if degs else None


def _expand(dims_pairs, prefix):
    out = []
    for deg, mult in dims_pairs:
        for idx in range(mult):
            if deg == 0:
                label = "1"
            else:
                label = f"{prefix}{deg}" + (f"_{idx}" if mult > 1 else "")
            out.append(((deg, idx), label, deg))
    return out


def _cell_label(tlabel, eps, i, elabel, d, even):
    parts = []
    if tlabel != "1":
        parts.append(tlabel)
    if even:
        if eps:
            parts.append(f"s⁻¹x{d}")
        if i:
            parts.append(f"γ{i}(τ)" if i > 1 else "τ")
    else:
        if i:
            parts.append(f"γ{i}(s⁻¹x{d})" if i > 1 else f"s⁻¹x{d}")
    if elabel != "1":
        parts.append(f"⊗{elabel}")
    return "·".join(parts) if parts else "1"


def e2_page(spec: FibreSquareSpec, window: DegreeWindow | None = None) -> BigradedPage:
    """The second page, zero differential until d₂ is installed."""
    window = window or DegreeWindow(0, 8 * spec.d)
    if window.hi < 2 * spec.d:
        raise WindowTooSmall("the window must reach total degree 2d")
    return BigradedPage(spec, window)


def install_d2(page: BigradedPage, hopf=None) -> BigradedPage:
    """d₂(γ_i(τ)) = h · x_top · γ_{i-1}(τ), multiplicatively over ∧(s⁻¹x_d)
    and linearly over top and extra classes; h must vanish when d is odd."""
    f = page.field
    h = page.spec.hopf if hopf is None else (f.from_int(hopf) if isinstance(hopf, int) else hopf)
    if not page.even and not f.is_zero(h):
        raise OddDimensionNonzeroHopf("the Hopf invariant vanishes over odd spheres")
    top_deg = page.top_sphere_degree
    d2 = {}
    for (s, t), elems in page.cells.items():
        target_st = (s + 2, t - 1)
        tgt = page.cells.get(target_st, [])
        if not tgt or f.is_zero(h):
            continue
        mat = [[f.zero()] * len(elems) for _ in range(len(tgt))]
        nonzero = False
        for j, (key, _) in enumerate(elems):
            tdeg, tidx, eps, i, edeg, eidx = key
            if i == 0 or tdeg != 0 or top_deg is None:
                continue    # top class multiples die on x², γ_0 has no target
            target_key = (top_deg, tidx, eps, i - 1, edeg, eidx)
            loc = page.index.get(target_key)
            if loc is None or loc[0] != target_st:
                continue
            mat[loc[1]][j] = h
            nonzero = True
        if nonzero:
            d2[(s, t)] = mat
    page.d2 = d2
    _check_d2_squares_to_zero(page)
    return page


def _check_d2_squares_to_zero(page):
    f = page.field
    for (s, t), mat in (page.d2 or {}).items():
        nxt = (page.d2 or {}).get((s + 2, t - 1))
        if nxt is None:
            continue
        for j in range(len(mat[0]) if mat else 0):
            for i in range(len(nxt)):
                acc = f.zero()
                for k in range(len(mat)):
                    acc = f.add(acc, f.mul(nxt[i][k], mat[k][j]))
                if not f.is_zero(acc):
                    raise PresentationError("d₂ ∘ d₂ ≠ 0 on the installed page")


def comodule_compatibility(page: BigradedPage, i_max: int = 4) -> bool:
    """Δ ∘ d₂ = (d₂ ⊗ 1 ± 1 ⊗ d̃₂) ∘ Δ on γ_i(τ) for i <= i_max, with the
    loop-space side having zero differential.  Coefficients are compared
    symbolically on the divided-power comultiplication Δγ_n = Σ γ_a ⊗ γ_b."""
    f = page.field
    h = page.spec.hopf
    top_deg = page.top_sphere_degree
    for i in range(1, i_max + 1):
        lhs = {}
        # Δ(d₂ γ_i) = Δ(h x γ_{i-1}) = h Σ_{a+b=i-1} x γ_a ⊗ γ_b
        for a in range(i):
            lhs[((top_deg, a), i - 1 - a)] = h
        rhs = {}
        # (d₂ ⊗ 1)(Σ_{a+b=i} γ_a ⊗ γ_b) = Σ_{a>=1} h x γ_{a-1} ⊗ γ_b
        for a in range(1, i + 1):
            rhs[((top_deg, a - 1), i - a)] = h
        if {k: v for k, v in lhs.items() if not f.is_zero(v)} != \
                {k: v for k, v in rhs.items() if not f.is_zero(v)}:
            return False
    return True


# ---------------------------------------------------------------------------
# Page turn and collapse certification
# ---------------------------------------------------------------------------


@dataclass
class EmssResult:
    e3_cells: dict           # (s, t) -> dim
    total_dims: dict         # total degree -> dim
    verdict: FinitenessVerdict
    collapse_certified: bool
    no_extension_problem: bool

    def to_json(self):
        return {
            "e3": {f"{s},{t}": v for (s, t), v in sorted(self.e3_cells.items())},
            "totalDims": {str(n): v for n, v in sorted(self.total_dims.items())},
            "verdict": self.verdict.to_json(),
            "collapseCertified": self.collapse_certified,
            "noExtensionProblem": self.no_extension_problem,
        }


def run_to_stable(page: BigradedPage, window: DegreeWindow | None = None) -> EmssResult:
    """Turn the page once and certify E₃ = E∞ by bidegree arithmetic.

    E₃ is exact linear algebra per cell.  Certification scans all pairs of
    surviving cells for a possible d_r (r >= 3): target s-column minus source
    s-column equals r and the t-drop equals r - 1.  If such a pair exists the
    collapse cannot be certified and the run fails loudly.
    """
    if page.d2 is None:
        raise PresentationError("install d₂ before running the sequence")
    window = window or page.window
    f = page.field
    cert_hi = window.hi - 1   # outgoing d₂ from total degree hi leaves the page
    e3 = {}
    for st, elems in page.cells.items():
        if st[0] + st[1] > cert_hi:
            continue
        dim = len(elems)
        out_rank = rank(page.d2[st], f) if st in page.d2 else 0
        src = (st[0] - 2, st[1] + 1)
        in_rank = rank(page.d2[src], f) if src in page.d2 else 0
        surv = dim - out_rank - in_rank
        if surv < 0:
            raise PresentationError("rank bookkeeping failed on the page")
        if surv:
            e3[st] = surv
    # collapse certification
    nonzero = sorted(e3)
    for (s, t) in nonzero:
        for (s2, t2) in nonzero:
            r = s2 - s
            if r >= 3 and t - t2 == r - 1:
                raise CannotCertifyCollapse(
                    f"a d_{r} could connect cells {(s, t)} and {(s2, t2)}")
    total = {}
    for (s, t), v in e3.items():
        total[s + t] = total.get(s + t, 0) + v
    no_ext = all(v <= 1 for v in total.values())

    verdict = _stable_verdict(page, e3, total, window)
    return EmssResult(e3, total, verdict, True, no_ext)


def _stable_verdict(page, e3, total, window):
    f = page.field
    d = page.spec.d
    period = sphere_block_period(d)
    if not f.is_zero(page.spec.hopf) and page.even:
        # the pairing (1, ε, γ_i) -> (x_top, ε, γ_{i-1}) is exact in every
        # degree, inside the window and beyond: survivors form a bounded set
        return finite_verdict(total)
    ws = periodic_witnesses(total, period, window.hi - 2)
    if ws:
        return infinite_verdict(period, ws)
    if not e3:
        return finite_verdict({})
    if max(s + t for s, t in e3) + period <= window.hi and _pattern_stops(page, e3, window):
        return finite_verdict(total)
    return UNKNOWN


def _pattern_stops(page, e3, window):
    # survivors fit strictly below the last full period of the window
    top = max((s + t for s, t in e3), default=0)
    return top <= window.hi - 2 * sphere_block_period(page.spec.d)


def compactness_from_hopf(d: int, hopf: int, field: FieldTag,
                          window: DegreeWindow | None = None):
    """Whether the pullback of the path-loop fibration along a map
    S^{2d-1} → S^d with the given Hopf invariant has a compact cochain
    module, decided by running the spectral sequence to its stable page.
    Returns (bool, EmssResult)."""
    h = field.from_int(hopf)
    if d % 2 and not field.is_zero(h):
        raise OddDimensionNonzeroHopf("odd-sphere Hopf invariants vanish")
    spec = FibreSquareSpec.make(d, {0: 1, 2 * d - 1: 1}, h, field)
    window = window or DegreeWindow(0, 8 * d)
    page = install_d2(e2_page(spec, window))
    result = run_to_stable(page, window)
    return result.verdict.is_finite, result
