"""Resolutions, derived tensors, phi verdicts, filtrations."""

import random

import pytest

from dglevels.algebra import DGAlgebraPresentation, Generator
from dglevels.errors import (
    InvalidFiltration,
    NotSimplyConnected,
    OddGenerator,
    StrategyInapplicable,
)
from dglevels.field import QQ, GF2
from dglevels.graded import DegreeWindow
from dglevels.module import DGModulePresentation, shift
from dglevels.resolve import (
    SemifreeFiltration,
    bar_length_filtration,
    bar_resolution,
    derived_tensor,
    filtration_class,
    generator_depth_filtration,
    infinite_level_certificate,
    is_compact,
    koszul_resolution_poly,
    koszul_resolution_sphere,
    level_upper_bound,
    periodic_witnesses,
    phi,
    residue_module,
)


def sphere(d, field=QQ):
    return DGAlgebraPresentation.sphere_cohomology(d, field)


def chain_module(d, m, field=QQ, bottom=0):
    A = sphere(d, field)
    gens = [(f"e{j}", bottom + j * (d - 1)) for j in range(m + 1)]
    diff = {f"e{j}": {f"e{j-1}": A.generator_poly(f"x{d}")} for j in range(1, m + 1)}
    return DGModulePresentation.free(A, gens, diff)


# -- bar resolution ------------------------------------------------------------


def test_bar_resolution_of_k_is_a_resolution():
    A = sphere(4)
    res = bar_resolution(residue_module(A), A, cutoff=13, window=DegreeWindow(0, 12))
    dims = res.module.cohomology_dims(DegreeWindow(0, 10))
    assert dims == {0: 1}


def test_bar_length_t_part_has_degree_at_least_t():
    A = sphere(4)
    res = bar_resolution(residue_module(A), A, window=DegreeWindow(0, 12))
    for label, deg in res.module.generators:
        t = label.count("|") + (1 if "[" in label else 0)
        assert deg >= t


def test_bar_resolution_of_the_algebra_is_quasi_iso_to_it():
    A = sphere(4)
    M = DGModulePresentation.free_rank_one(A)
    res = bar_resolution(M, A, window=DegreeWindow(0, 10))
    dims = res.module.cohomology_dims(DegreeWindow(0, 8))
    assert dims == {0: 1, 4: 1}


def test_bar_needs_simply_connected():
    # a degree-1 generator breaks truncation soundness
    A = DGAlgebraPresentation(QQ, [Generator("t", 1, "exterior")])
    with pytest.raises(NotSimplyConnected):
        bar_resolution(residue_module(A), A)


def test_bar_length_filtration_is_semifree_over_cohomology_algebras():
    A = sphere(4)
    res = bar_resolution(residue_module(A), A, window=DegreeWindow(0, 12))
    filt = bar_length_filtration(res)
    assert filtration_class(filt) >= 1


# -- Koszul resolutions -----------------------------------------------------------


def test_sphere_koszul_resolves_k():
    for d in (3, 4, 5, 6):
        res = koszul_resolution_sphere(d, QQ, cap=30)
        assert res.module.cohomology_dims(DegreeWindow(-1, 25)) == {0: 1}


def test_sphere_koszul_tor_pattern_even():
    A = sphere(4)
    K = residue_module(A)
    tor = derived_tensor(K, K, strategy="koszul", window=DegreeWindow(0, 12))
    assert tor.dims == {0: 1, 3: 1, 6: 1, 9: 1, 12: 1}
    assert all(n % 6 in (0, 3) for n in tor.dims)


def test_sphere_koszul_tor_pattern_odd():
    A = sphere(3)
    K = residue_module(A)
    tor = derived_tensor(K, K, strategy="koszul", window=DegreeWindow(0, 12))
    assert tor.dims == {n: 1 for n in range(0, 13, 2)}


def test_poly_koszul_single_even_generator():
    res = koszul_resolution_poly([4], QQ)
    assert res.module.cohomology_dims(DegreeWindow(-1, 10)) == {0: 1}
    assert res.bounded


def test_poly_koszul_empty_is_k():
    res = koszul_resolution_poly([], QQ)
    assert res.module.cohomology_dims(DegreeWindow(-1, 4)) == {0: 1}


def test_poly_koszul_odd_guard():
    with pytest.raises(OddGenerator):
        koszul_resolution_poly([4, 7], QQ)
    res = koszul_resolution_poly([4, 6, 7], GF2)   # allowed in characteristic 2
    assert res.module.cohomology_dims(DegreeWindow(-1, 10)) == {0: 1}


# -- derived tensor -----------------------------------------------------------------


def test_algebra_tensor_k_is_k():
    A = sphere(4)
    M = DGModulePresentation.free_rank_one(A)
    tor = derived_tensor(M, residue_module(A), strategy="given", window=DegreeWindow(0, 10))
    assert tor.dims == {0: 1}
    assert tor.bounded


def test_bar_vs_koszul_agreement_on_sphere_tor():
    A = sphere(4)
    K = residue_module(A)
    w = DegreeWindow(0, 12)
    bar = derived_tensor(K, K, strategy="bar", window=w)
    kos = derived_tensor(K, K, strategy="koszul", window=w)
    assert bar.dims == kos.dims


def test_s7_pullback_tensor_is_infinite():
    A4 = sphere(4)
    hs7 = DGModulePresentation.trivial(A4, shifts=(0, 7), labels=["1", "x7"])
    tor = derived_tensor(hs7, hs7, strategy="koszul", window=DegreeWindow(0, 40))
    v = tor.verdict()
    assert v.is_infinite
    assert v.period == 6
    assert len(v.witnesses) >= 3
    # H*(S^7) ⊗ Γ[w] ⊗ ∧(s⁻¹x4) ⊗ H*(S^7) with zero differential: spot dims
    assert tor.dims[0] == 1 and tor.dims[7] == 2 and tor.dims[10] == 2


def test_strategy_guard():
    A = sphere(4)
    M = chain_module(4, 1)
    with pytest.raises(StrategyInapplicable):
        derived_tensor(residue_module(A), residue_module(A), strategy="nonsense")
    # Koszul requires a trivial (or free) module
    raw = DGModulePresentation.trivial(A)
    cooked = shift(raw, 0)
    assert derived_tensor(cooked, raw, strategy="koszul").dims[0] == 1


def test_truncation_soundness_under_cutoff_increase():
    A = sphere(4)
    K = residue_module(A)
    base_cut = 13
    a = bar_resolution(K, A, cutoff=base_cut, window=DegreeWindow(0, 12))
    b = bar_resolution(K, A, cutoff=base_cut + 4, window=DegreeWindow(0, 12))
    da = a.module.cohomology_dims(DegreeWindow(0, 10))
    db = b.module.cohomology_dims(DegreeWindow(0, 10))
    for n in range(0, base_cut - 1):
        assert da.get(n, 0) == db.get(n, 0)


def test_bar_koszul_agreement_randomized():
    rng = random.Random(20250810)
    for trial in range(20):
        d = rng.choice([2, 3, 4, 5])
        field = rng.choice([QQ, GF2])
        shifts = tuple(sorted(rng.choice([0, 1, 2, d - 1, d]) for _ in range(rng.randint(1, 3))))
        A = sphere(d, field)
        M = DGModulePresentation.trivial(A, shifts=shifts)
        N = residue_module(A)
        w = DegreeWindow(0, 10)
        bar = derived_tensor(M, N, strategy="bar", window=w)
        kos = derived_tensor(M, N, strategy="koszul", window=w)
        hi = min(bar.certified_hi, kos.certified_hi)
        for n in range(0, hi + 1):
            assert bar.dims.get(n, 0) == kos.dims.get(n, 0), (trial, d, field, shifts, n)


# -- phi and compactness ---------------------------------------------------------------


def test_phi_of_the_algebra():
    A = sphere(4)
    v = phi(DGModulePresentation.free_rank_one(A))
    assert v.is_finite and v.total == 1


def test_phi_of_molecule_model():
    v = phi(chain_module(4, 1))
    assert v.is_finite and v.total == 2


def test_phi_of_k_is_infinite():
    A = sphere(4)
    v = phi(residue_module(A), window=DegreeWindow(0, 30))
    assert v.is_infinite
    assert v.period == 6
    assert v.witnesses[:3] == (0, 6, 12)


def test_phi_shift_invariance():
    for k in (-2, 1, 3):
        a = phi(chain_module(4, 2))
        b = phi(shift(chain_module(4, 2), k))
        assert a.total == b.total


def test_is_compact():
    A = sphere(4)
    assert is_compact(DGModulePresentation.free_rank_one(A))[0] is True
    assert is_compact(chain_module(4, 3))[0] is True
    assert is_compact(residue_module(A), window=DegreeWindow(0, 30))[0] is False


def test_infinite_level_certificate_cases():
    A4, A7 = sphere(4), sphere(7)
    hs7 = DGModulePresentation.trivial(A4, shifts=(0, 7))
    tor = derived_tensor(hs7, hs7, strategy="koszul", window=DegreeWindow(0, 40))
    cert = infinite_level_certificate(tor, algebra=A7)
    assert cert is not None and cert.period == 6
    assert infinite_level_certificate(chain_module(4, 1)) is None
    assert infinite_level_certificate(DGModulePresentation.free_rank_one(A4)) is None


def test_periodic_witnesses_requires_reaching_horizon():
    dims = {0: 1, 6: 1, 12: 1}
    assert periodic_witnesses(dims, 6, 14) == (0, 6, 12)
    assert periodic_witnesses(dims, 6, 40) is None   # progression stops early
    assert periodic_witnesses({0: 1, 6: 1}, 6, 8) is None  # only two witnesses


# -- filtrations ----------------------------------------------------------------------


def test_filtration_class_of_free_rank_one():
    A = sphere(4)
    M = DGModulePresentation.free_rank_one(A)
    filt = SemifreeFiltration(M, (frozenset({"e"}),))
    assert filtration_class(filt) == 0
    assert level_upper_bound(filt) == 1


def test_filtration_class_of_chain_modules():
    for m in (1, 2, 4):
        M = chain_module(4, m)
        stages = tuple(frozenset(f"e{j}" for j in range(c + 1)) for c in range(m + 1))
        filt = SemifreeFiltration(M, stages)
        assert filtration_class(filt) == m
        assert level_upper_bound(filt) == m + 1


def test_two_stage_pile_filtration_has_class_two():
    M = chain_module(3, 2)
    filt = generator_depth_filtration(M)
    assert filtration_class(filt) == 2
    assert level_upper_bound(filt) == 3


def test_invalid_filtration_detected():
    M = chain_module(4, 1)
    bad = SemifreeFiltration(M, (frozenset({"e1"}), frozenset({"e0", "e1"})))
    with pytest.raises(InvalidFiltration):
        filtration_class(bad)


def test_depth_filtration_matches_molecule_height():
    for d in (3, 4):
        for m in range(0, 4):
            filt = generator_depth_filtration(chain_module(d, m))
            assert filtration_class(filt) == m
