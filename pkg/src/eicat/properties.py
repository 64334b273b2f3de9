"""Randomized property checks for the truncation functors and the resolution engines.

Every check draws its own generator from ``(seed, index)``, so one job always
samples the same modules.  Checks that need minimal resolutions report
``skipped`` outside the semisimple regime instead of failing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .algcore import invertibility_criterion
from .catbuild import FiniteCategory, aut_group, build_category
from .exactlinalg import FieldSpec, rank_array
from .homres import (
    HomComplex,
    FreeResolution,
    global_dimension,
    hom_dims_from_covers,
    homological_degrees,
    is_projective,
    minimal_resolution,
    projective_cover,
    projective_dimension,
    verify_genetic_shift,
)
from .repmod import (
    CModule,
    ModuleHom,
    builtin_simples,
    generating_degree,
    h0,
    h0_data,
    hom_dimension,
    image,
    induced_projective,
    lift,
    lift_hom,
    module_hom_space,
    orbit_data,
    radical_quotient_module,
    random_module,
    random_short_exact,
    regular_group_module,
    representable_projective,
    restrict,
    restrict_hom,
    simple_module,
)

PASS, FAIL, SKIP = "pass", "fail", "skipped"

# larger truncations make the per-morphism module storage too slow for a sample run
MAX_MORPHISMS = 3000


@dataclass
class PropertyResult:
    name: str
    status: str
    checked: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "checked": self.checked, "detail": self.detail}


@dataclass
class SuiteContext:
    C: FiniteCategory  # C_n
    field: FieldSpec
    headroom: int
    samples: int
    seed: int
    bound: int

    @property
    def n(self) -> int:
        return self.C.n

    @property
    def N(self) -> int:
        return self.C.n + self.headroom

    def category(self, m: int) -> FiniteCategory:
        return build_category(self.C.species, m)

    def size(self, m: int) -> int:
        sp = self.C.species
        return sum(sp.hom_count(a, b) for b in range(m + 1) for a in range(b + 1))

    def semisimple(self, m: int) -> bool:
        return invertibility_criterion(self.category(m), self.field).holds

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, index])


def same_module(A: CModule, B: CModule) -> bool:
    if A.dims != B.dims or len(A.action) != len(B.action):
        return False
    return all(a.shape == b.shape and not np.any(a != b) for a, b in zip(A.action, B.action))


def _short_exact_defects(inc: ModuleHom, proj: ModuleHom) -> list[str]:
    """Reasons why ``0 -> U -> V -> W -> 0`` fails to be exact, empty if it is."""
    F = inc.source.field
    bad = []
    if not (inc.is_natural() and proj.is_natural()):
        bad.append("not natural")
    if not inc.is_injective():
        bad.append("left map not injective")
    if not proj.is_surjective():
        bad.append("right map not surjective")
    for x, (a, b) in enumerate(zip(inc.maps, proj.maps)):
        if a.shape[1] and b.shape[0] and np.any(F.matmul(b, a) != 0):
            bad.append(f"composite nonzero at {x}")
        if rank_array(F, a) != b.shape[1] - rank_array(F, b):
            bad.append(f"not exact in the middle at {x}")
    return bad


# -- checks that hold in every characteristic -------------------------------------

def check_functoriality(ctx: SuiteContext, rng) -> PropertyResult:
    reach = _reach(ctx, "functoriality")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    CN = ctx.category(N)
    bad, count = [], 0
    for _ in range(ctx.samples):
        W = random_module(ctx.C, ctx.field, rng)
        V = random_module(CN, ctx.field, rng)
        for M in (W, V, h0(W), h0(V), lift(W, N), restrict(V, ctx.n)):
            count += 1
            if M.functoriality_defects(limit=600, rng=rng):
                bad.append(repr(M))
    return PropertyResult("functoriality", FAIL if bad else PASS, count, _detail(bad, note))


def check_h0_restriction(ctx: SuiteContext, rng) -> PropertyResult:
    """Restricting ``H_0(V)`` gives ``H_0`` of the restriction, quotient maps included."""
    reach = _reach(ctx, "h0_commutes_with_restriction")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    CN = ctx.category(N)
    bad = []
    for k in range(ctx.samples):
        V = random_module(CN, ctx.field, rng)
        big, small = h0_data(V), h0_data(restrict(V, ctx.n))
        if not same_module(restrict(big.module, ctx.n), small.module):
            bad.append(f"sample {k}: modules differ")
            continue
        for x in ctx.C.objects:
            if np.any(big.quotients[x].project != small.quotients[x].project):
                bad.append(f"sample {k}: quotient maps differ at {x}")
    return PropertyResult("h0_commutes_with_restriction", FAIL if bad else PASS, ctx.samples, _detail(bad, note))


def check_h0_lift(ctx: SuiteContext, rng) -> PropertyResult:
    """``H_0`` of a lift, restricted back, is ``H_0`` of the original module."""
    reach = _reach(ctx, "h0_of_lift")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    bad = []
    for k in range(ctx.samples):
        W = random_module(ctx.C, ctx.field, rng)
        H = h0(lift(W, N))
        if any(H.dims[ctx.n + 1:]) or not same_module(restrict(H, ctx.n), h0(W)):
            bad.append(f"sample {k}")
    return PropertyResult("h0_of_lift", FAIL if bad else PASS, ctx.samples, _detail(bad, note))


def check_restrict_lift(ctx: SuiteContext, rng) -> PropertyResult:
    reach = _reach(ctx, "restrict_after_lift_is_identity")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    bad = []
    for k in range(ctx.samples):
        W = random_module(ctx.C, ctx.field, rng)
        if not same_module(restrict(lift(W, N), ctx.n), W):
            bad.append(f"sample {k}")
    return PropertyResult("restrict_after_lift_is_identity", FAIL if bad else PASS, ctx.samples, _detail(bad, note))


def check_lift_exact(ctx: SuiteContext, rng) -> PropertyResult:
    reach = _reach(ctx, "lift_is_exact")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    bad = []
    for k in range(ctx.samples):
        inc, proj = random_short_exact(ctx.C, ctx.field, rng)
        why = _short_exact_defects(lift_hom(inc, N), lift_hom(proj, N))
        if why:
            bad.append(f"sample {k}: {why[0]}")
    return PropertyResult("lift_is_exact", FAIL if bad else PASS, ctx.samples, _detail(bad, note))


def check_restrict_exact(ctx: SuiteContext, rng) -> PropertyResult:
    reach = _reach(ctx, "restrict_is_exact")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    CN = ctx.category(N)
    bad = []
    for k in range(ctx.samples):
        inc, proj = random_short_exact(CN, ctx.field, rng)
        why = _short_exact_defects(restrict_hom(inc, ctx.n), restrict_hom(proj, ctx.n))
        if why:
            bad.append(f"sample {k}: {why[0]}")
    return PropertyResult("restrict_is_exact", FAIL if bad else PASS, ctx.samples, _detail(bad, note))


def check_yoneda(ctx: SuiteContext, rng) -> PropertyResult:
    """``dim Hom(kCe_x, V) = dim V_x``."""
    C, F = ctx.C, ctx.field
    reps = [representable_projective(C, F, x) for x in C.objects]
    bad, count = [], 0
    for k in range(ctx.samples):
        V = random_module(C, F, rng)
        for x in C.objects:
            if reps[x].total_dim > 80:
                continue
            count += 1
            if hom_dimension(reps[x], V) != V.dims[x]:
                bad.append(f"sample {k}, object {x}")
    return PropertyResult("yoneda_dimension", FAIL if bad else PASS, count, "; ".join(bad[:3]))


def _canonical_induced_map(C: FiniteCategory, F: FieldSpec, x: int, P: CModule) -> ModuleHom:
    # rep_k (x) e_h  |->  rep_k o h
    G = aut_group(C, x)
    maps = []
    for y in C.objects:
        T = C.table(x, x, y)
        od = orbit_data(C, x, y)
        M = F.zeros((len(C.hom[(x, y)]), P.dims[y]))
        for k, r in enumerate(od.reps):
            for h in range(G.order):
                M[int(T[r, h]), k * G.order + h] = F.one()
        maps.append(M)
    return ModuleHom(P, representable_projective(C, F, x), maps)


def _bijective(phi: ModuleHom) -> bool:
    return phi.source.dims == phi.target.dims and phi.is_injective()


def check_induced_regular(ctx: SuiteContext, rng) -> PropertyResult:
    """Inducing the regular module of ``Aut(x)`` gives the representable at ``x``.

    The canonical map ``rep (x) h -> rep o h`` must be a natural bijection.
    For small modules, ``module_hom_space`` must also agree with Yoneda:
    ``dim Hom(P, kCe_x) = dim (kCe_x)_x`` when ``P`` is isomorphic to ``kCe_x``.
    """
    C, F = ctx.C, ctx.field
    bad = []
    for x in C.objects:
        P = induced_projective(C, F, x, regular_group_module(aut_group(C, x), F))
        R = representable_projective(C, F, x)
        if P.dims != R.dims:
            bad.append(f"object {x}: dims {P.dims} vs {R.dims}")
            continue
        phi = _canonical_induced_map(C, F, x, P)
        if not (phi.is_natural() and _bijective(phi)):
            bad.append(f"object {x}: canonical map is not an isomorphism")
        elif R.total_dim <= 40 and len(module_hom_space(P, R)) != R.dims[x]:
            bad.append(f"object {x}: hom space has the wrong dimension")
    return PropertyResult("induced_regular_is_representable", FAIL if bad else PASS, C.n + 1, "; ".join(bad[:3]))


def check_restricted_projectives(ctx: SuiteContext, rng) -> PropertyResult:
    """Restriction sends representables of the larger truncation to projectives."""
    reach = _reach(ctx, "restriction_preserves_projectives")
    if isinstance(reach, PropertyResult):
        return reach
    N, note = reach
    CN = ctx.category(N)
    bad, count = [], 0
    for x in CN.objects:
        if sum(len(CN.hom[(x, y)]) for y in CN.objects) > 400:
            continue
        P = representable_projective(CN, ctx.field, x)
        count += 1
        if not is_projective(restrict(P, ctx.n)):
            bad.append(f"object {x}")
    return PropertyResult("restriction_preserves_projectives", FAIL if bad else PASS, count, _detail(bad, note))


def check_free_resolution_exact(ctx: SuiteContext, rng) -> PropertyResult:
    bad = []
    for k in range(ctx.samples):
        V = random_module(ctx.C, ctx.field, rng)
        res = FreeResolution(V, seed=k).ensure(ctx.n + 2)
        if res.exactness_defects():
            bad.append(f"sample {k}: {res.exactness_defects()[0]}")
    return PropertyResult("free_resolution_exact", FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


# -- checks needing the semisimple regime ----------------------------------------------

def _detail(bad: list[str], note: str = "") -> str:
    return "; ".join(bad[:3] + ([note] if note else []))


def _too_big(ctx: SuiteContext, name: str, m: int) -> PropertyResult | None:
    if ctx.size(m) <= MAX_MORPHISMS:
        return None
    return PropertyResult(name, SKIP, 0, f"C_{m} has {ctx.size(m)} morphisms, above the limit {MAX_MORPHISMS}")


def _reach(ctx: SuiteContext, name: str) -> tuple[int, str] | PropertyResult:
    """The largest truncation ``m <= N`` within the size limit, with a note when the headroom shrank."""
    m = max(k for k in range(ctx.n, ctx.N + 1) if k == ctx.n or ctx.size(k) <= MAX_MORPHISMS)
    if m == ctx.n and ctx.N > ctx.n:
        return _too_big(ctx, name, ctx.n + 1)
    note = "" if m == ctx.N else f"headroom reduced to C_{m}: C_{ctx.N} has {ctx.size(ctx.N)} morphisms"
    return m, note


def _needs(ctx: SuiteContext, name: str, m: int) -> PropertyResult | None:
    if (skip := _too_big(ctx, name, m)):
        return skip
    if ctx.semisimple(m):
        return None
    return PropertyResult(name, SKIP, 0, f"characteristic {ctx.field.characteristic} divides an automorphism "
                                         f"group order of C_{m}; minimal resolutions unavailable")


def check_minimal_resolution(ctx: SuiteContext, rng) -> PropertyResult:
    """Exactness, and each cover has the same ``H_0`` as the module it covers."""
    name = "minimal_resolution_exact_and_minimal"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    bad = []
    for k in range(ctx.samples):
        V = random_module(ctx.C, ctx.field, rng)
        res = minimal_resolution(V)
        if not res.complete:
            bad.append(f"sample {k}: did not terminate")
        if res.exactness_defects():
            bad.append(f"sample {k}: {res.exactness_defects()[0]}")
        for s, (cov, f) in enumerate(zip(res.covers, res.maps)):
            covered = f.target if s == 0 else image(f)[0]
            if h0(cov.projective).dims != h0(covered).dims:
                bad.append(f"sample {k}: cover {s} not minimal")
    return PropertyResult(name, FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


def check_ext_oracle(ctx: SuiteContext, rng) -> PropertyResult:
    """``dim Ext^s(V, A/J)`` from a free resolution equals ``dim Hom(P^s, A/J)`` for minimal ``P``."""
    name = "ext_matches_minimal_terms"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    C, F = ctx.C, ctx.field
    T = radical_quotient_module(C, F)
    top = C.n + 2
    bad = []
    for k in range(ctx.samples):
        V = random_module(C, F, rng)
        H = HomComplex(FreeResolution(V, seed=k), T)
        ext = [H.ext_dim(s) for s in range(top + 1)]
        homs = hom_dims_from_covers(minimal_resolution(V, top), T)
        homs = (homs + [0] * (top + 1))[: top + 1]
        if ext != homs:
            bad.append(f"sample {k}: ext {ext} vs minimal {homs}")
    return PropertyResult(name, FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


def simple_resolution_defects(C: FiniteCategory, F: FieldSpec) -> tuple[int, list[str]]:
    """Check every built-in simple has a linear minimal resolution of length ``n - x``."""
    bad, count = [], 0
    for x in C.objects:
        for label, W in builtin_simples(C, F, x):
            count += 1
            res = minimal_resolution(simple_module(C, F, x, W))
            betti = res.betti()
            if res.length != C.n - x or not betti.is_linear(x):
                bad.append(f"S_{x}[{label}]: length {res.length}, support {sorted(betti.support())}")
    return count, bad


def check_simple_linear(ctx: SuiteContext, rng) -> PropertyResult:
    name = "simple_resolutions_linear"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    count, bad = simple_resolution_defects(ctx.C, ctx.field)
    return PropertyResult(name, FAIL if bad else PASS, count, "; ".join(bad[:3]))


def check_pd_simple_zero(ctx: SuiteContext, rng) -> PropertyResult:
    name = "pd_of_simple_at_0"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    r = projective_dimension(simple_module(ctx.C, ctx.field, 0), ctx.bound)
    ok = r.value == ctx.n
    return PropertyResult(name, PASS if ok else FAIL, 1, "" if ok else f"pd = {r}")


def check_degree_bound(ctx: SuiteContext, rng) -> PropertyResult:
    """For lifted modules, ``gd(P^s) <= max support + s`` in the minimal resolution."""
    name = "generating_degree_bound"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    # lift as far as the headroom allows while minimal resolutions still exist
    m = max(k for k in range(ctx.n, ctx.N + 1) if ctx.size(k) <= MAX_MORPHISMS and ctx.semisimple(k))
    bad = []
    for k in range(ctx.samples):
        W = lift(random_module(ctx.C, ctx.field, rng), m)
        top = W.max_support()
        hd = homological_degrees(W, m + 1)
        if hd[0] != generating_degree(W) or any(d > top + s for s, d in enumerate(hd)):
            bad.append(f"sample {k}: degrees {hd}, max support {top}")
    return PropertyResult(name, FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


def check_cover_restriction(ctx: SuiteContext, rng) -> PropertyResult:
    """Restricting a projective cover over ``C_{n+1}`` gives the cover of the restriction."""
    name = "cover_restricts_to_cover"
    if (skip := _needs(ctx, name, ctx.n + 1)):
        return skip
    big = ctx.category(ctx.n + 1)
    bad = []
    for k in range(ctx.samples):
        V = random_module(big, ctx.field, rng)
        upstairs = sorted(p for p in projective_cover(V).multiset if p[0] <= ctx.n)
        downstairs = sorted(projective_cover(restrict(V, ctx.n)).multiset)
        if upstairs != downstairs:
            bad.append(f"sample {k}: {upstairs} vs {downstairs}")
    return PropertyResult(name, FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


def _trim(rows: list[list[int]]) -> list[list[int]]:
    rows = [list(r) for r in rows]
    while rows and not any(rows[-1]):
        rows.pop()
    return rows


def check_betti_restriction(ctx: SuiteContext, rng) -> PropertyResult:
    """Termwise restriction of a minimal resolution over ``C_{n+1}`` is minimal over ``C_n``."""
    name = "betti_table_restricts"
    if (skip := _needs(ctx, name, ctx.n + 1)):
        return skip
    big = ctx.category(ctx.n + 1)
    bad = []
    for k in range(ctx.samples):
        V = random_module(big, ctx.field, rng)
        up = minimal_resolution(V, ctx.n + 3)
        down = minimal_resolution(restrict(V, ctx.n), ctx.n + 3)
        cut = _trim([row[: ctx.n + 1] for row in up.betti().rows])
        if cut != _trim(down.betti().rows):
            bad.append(f"sample {k}: {cut} vs {down.betti().rows}")
    return PropertyResult(name, FAIL if bad else PASS, ctx.samples, "; ".join(bad[:3]))


def check_genetic_shift(ctx: SuiteContext, rng) -> PropertyResult:
    """The shift of ``kC_{n+1} e_x`` is projective and generated in degrees ``x-1`` and ``x``."""
    name = "shift_of_representable"
    if (skip := _needs(ctx, name, ctx.n)):
        return skip
    big = ctx.category(ctx.n + 1)
    bad = []
    for x in range(1, ctx.n + 1):
        rep = verify_genetic_shift(big, ctx.field, x)
        if not rep.passed:
            bad.append(f"x={x}: support {rep.support}, projective {rep.projective}")
    return PropertyResult(name, FAIL if bad else PASS, ctx.n, "; ".join(bad[:3]))


def check_global_dimension(ctx: SuiteContext, rng) -> PropertyResult:
    """Finite computed global dimension exactly when the criterion holds, and then at most ``n``."""
    rep = global_dimension(ctx.C, ctx.field, ctx.bound)
    finite = rep.computed.value is not None
    ok = finite == rep.criterion.holds and (not finite or rep.computed.value <= ctx.n)
    return PropertyResult("global_dimension_matches_criterion", PASS if ok else FAIL, 1,
                          f"computed {rep.computed_str()}, criterion {rep.criterion.holds}")


REPMOD_CHECKS: list[Callable] = [
    check_functoriality,
    check_h0_restriction,
    check_h0_lift,
    check_restrict_lift,
    check_lift_exact,
    check_restrict_exact,
    check_yoneda,
    check_induced_regular,
]

HOMRES_CHECKS: list[Callable] = [
    check_restricted_projectives,
    check_free_resolution_exact,
    check_minimal_resolution,
    check_ext_oracle,
    check_simple_linear,
    check_pd_simple_zero,
    check_degree_bound,
    check_cover_restriction,
    check_betti_restriction,
    check_genetic_shift,
    check_global_dimension,
]

ALL_CHECKS = REPMOD_CHECKS + HOMRES_CHECKS


@dataclass
class SuiteReport:
    species: str
    n: int
    field: str
    seed: int
    results: list[PropertyResult] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def to_json(self) -> dict:
        return {"species": self.species, "n": self.n, "field": self.field, "seed": self.seed,
                "passed": self.passed, "results": [r.to_json() for r in self.results]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def run_suite(C: FiniteCategory, field: FieldSpec, seed: int = 0, samples: int = 20, headroom: int = 2,
              bound: int | None = None, checks: list[Callable] | None = None) -> SuiteReport:
    ctx = SuiteContext(C, field, headroom, samples, seed, C.n + 4 if bound is None else bound)
    report = SuiteReport(C.species.label, C.n, str(field), seed)
    for check in checks or ALL_CHECKS:
        index = ALL_CHECKS.index(check) if check in ALL_CHECKS else len(ALL_CHECKS)
        report.results.append(check(ctx, ctx.rng(index)))
    return report
