"""The deterministic verification battery behind ``hdxwalk suite``.

Each criterion is a function returning a :class:`CriterionResult` whose
``details`` hold only numbers derived from fixed seeds, so two runs give
byte-identical reports. Wall-clock timing is kept out of the results.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cochains import Cochain, check_localization_identities, project_C0
from .complex import SimplicialComplex, WeightFunction, homogeneous_weight, validate
from .decomposition import decompose, verify_decomposition
from .errors import MixingBoundViolation
from .generators import GeneratorSpec, complete_complex, generate
from .mixing import (
    FaceSet,
    check_binary_mixing,
    check_mixing_bounds,
    second_eigenvalue_on_C0,
)
from .operators import assemble_upper_walk, verify_factorizations
from .spectra import SpectralProfile, check_descent, garland_terms, profile

__all__ = [
    "DEFAULT_SEED",
    "FIXTURES",
    "CriterionResult",
    "fixture",
    "fixture_profile",
    "CRITERIA",
    "run_criterion",
    "run_suite",
]

DEFAULT_SEED = 20240917
COCHAINS_PER_CASE = 100

# three tetrahedra in a row: 12 edges against 10 triangles, so ker d_1 is
# nontrivial and the choice of psi in the ladder actually matters
TETRA_CHAIN = ((0, 1, 2, 3), (1, 2, 3, 4), (2, 3, 4, 5))

# complexes every identity check runs on
FIXTURES: dict[str, GeneratorSpec | tuple] = {
    "triangle": GeneratorSpec("complete", {"m": 3, "n": 2}),
    "k4": GeneratorSpec("complete", {"m": 4, "n": 2}),
    "complete-6-2": GeneratorSpec("complete", {"m": 6, "n": 2}),
    "complete-7-3": GeneratorSpec("complete", {"m": 7, "n": 3}),
    "random-pure-12-2-p0.6-s7": GeneratorSpec("random-pure", {"m": 12, "n": 2, "p": 0.6}, 7),
    "random-pure-9-3-p0.6-s1": GeneratorSpec("random-pure", {"m": 9, "n": 3, "p": 0.6}, 1),
    "tetra-chain": TETRA_CHAIN,
}
# extra instances for the mixing criteria
REGULAR_FIXTURES: dict[str, GeneratorSpec] = {
    f"regular-40-{s}-s1": GeneratorSpec("regular-graph-matching", {"v": 40, "s": s}, 1)
    for s in (8, 16, 32)
}
HIGH_DIM_FIXTURES: dict[str, GeneratorSpec] = {
    "complete-7-3": FIXTURES["complete-7-3"],
    "complete-8-4": GeneratorSpec("complete", {"m": 8, "n": 4}),
    **{
        f"random-pure-9-3-p0.6-s{s}": GeneratorSpec("random-pure", {"m": 9, "n": 3, "p": 0.6}, s)
        for s in (1, 2, 3)
    },
    "random-pure-9-4-p0.7-s5": GeneratorSpec("random-pure", {"m": 9, "n": 4, "p": 0.7}, 5),
}


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.cid,
            "title": self.title,
            "pass": self.passed,
            "details": self.details,
            "notes": list(self.notes),
        }


@lru_cache(maxsize=None)
def _build(spec_key: tuple) -> tuple:
    kind, params, seed = spec_key
    return generate(GeneratorSpec(kind, dict(params), seed))


@lru_cache(maxsize=None)
def _explicit(tops: tuple) -> tuple:
    X = SimplicialComplex.from_top_faces(tops)
    return X, homogeneous_weight(X), {"kind": "explicit", "top_faces": [list(t) for t in tops]}


def fixture(spec: GeneratorSpec | tuple) -> tuple:
    """Cached generator output: (X, m, meta) or (X, m, A, meta).

    A plain tuple of top faces stands for the complex they span, with the
    homogeneous weight.
    """
    if isinstance(spec, tuple):
        return _explicit(spec)
    return _build((spec.kind, tuple(sorted(spec.params.items())), spec.seed))


@lru_cache(maxsize=None)
def _profile(m: WeightFunction) -> SpectralProfile:
    return profile(m)


def fixture_profile(spec: GeneratorSpec | tuple) -> SpectralProfile:
    return _profile(fixture(spec)[1])


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream])


def _max(xs: Iterable[float | None]) -> float:
    return max((x for x in xs if x is not None), default=0.0)


# -- criteria ---------------------------------------------------------------------

def criterion_1(seed: int) -> CriterionResult:
    """Weight identities, exact, on the named complexes and 20 random-pure seeds."""
    cases: list[tuple[str, GeneratorSpec | tuple]] = [
        ("triangle", FIXTURES["triangle"]),
        ("k4", FIXTURES["k4"]),
        ("complete-7-3", FIXTURES["complete-7-3"]),
    ]
    cases += [
        (f"random-pure-10-2-p0.6-s{s}", GeneratorSpec("random-pure", {"m": 10, "n": 2, "p": 0.6}, s))
        for s in range(1, 21)
    ]
    rows = []
    ok = True
    for name, spec in cases:
        X, m = fixture(spec)[:2]
        rep = validate(X, m)
        # the recursion-built weight must equal the closed form exactly
        formula = homogeneous_weight(X)
        closed_form = max(
            float(np.max(np.abs(m.of(k) - formula.of(k)))) for k in range(-1, X.n + 1)
        )
        good = rep.ok and closed_form == 0.0
        ok &= good
        rows.append(
            {
                "complex": name,
                "recursion": max(rep.recursion_residuals),
                "coface_sums": rep.coface_sum_residual,
                "totals": rep.totals_residual,
                "closed_form": closed_form,
                "pass": good,
            }
        )
    return CriterionResult(1, "weight identities", ok, {"cases": rows})


def criterion_2(seed: int) -> CriterionResult:
    tol = 1e-10
    rows = []
    ok = True
    for name, spec in FIXTURES.items():
        m = fixture(spec)[1]
        for k in range(m.n + 1):
            r = verify_factorizations(m, k)
            good = r.max_residual() <= tol
            ok &= good
            rows.append({"complex": name, "k": k, "upper": r.upper, "lower": r.lower, "pass": good})
    return CriterionResult(2, "operator factorizations", ok, {"tolerance": tol, "cases": rows})


def criterion_3(seed: int) -> CriterionResult:
    tol = 1e-10
    rows = []
    ident_ok = bound_ok = clamped_ok = True
    for ci, (name, spec) in enumerate(FIXTURES.items()):
        m = fixture(spec)[1]
        prof = fixture_profile(spec)
        for l in range(m.n + 1):
            rng = _rng(seed, 3, ci, l)
            loc = garl = 0.0
            violations = clamped_violations = 0
            worst_excess = 0.0
            for _ in range(COCHAINS_PER_CASE):
                phi = Cochain.random(m, l, rng)
                for k in range(-1, l):
                    r = check_localization_identities(phi, k)
                    loc = max(loc, _max(r))
                if l <= m.n - 1:
                    g = garland_terms(phi, prof, tol=tol)
                    garl = max(garl, g.identity_residual)
                    violations += not g.bounds_hold
                    clamped_violations += not g.clamped_bounds_hold
                    worst_excess = max(worst_excess, g.total - g.upper_bound)
            good = loc <= tol and garl <= tol
            ident_ok &= good
            bound_ok &= violations == 0
            clamped_ok &= clamped_violations == 0
            row = {"complex": name, "l": l, "localization": loc, "pass": good}
            if l <= m.n - 1:
                row.update(
                    {
                        "garland": garl,
                        "mu_l": prof.mu[l],
                        "correction_bound_violations": violations,
                        "correction_bound_clamped_violations": clamped_violations,
                        "correction_bound_worst_excess": worst_excess,
                    }
                )
            rows.append(row)
    notes = []
    if not bound_ok:
        notes.append(
            "the stated upper bound (k+1) mu_k ||phi||^2 is violated where mu_k < 0; "
            "the locally constant part of each phi_tau contributes 0 rather than mu_k times its norm"
        )
    return CriterionResult(
        3,
        "Garland identities and the correction-sum bounds",
        ident_ok and bound_ok,
        {
            "tolerance": tol,
            "cochains_per_case": COCHAINS_PER_CASE,
            "identities_pass": ident_ok,
            "bounds_pass": bound_ok,
            "clamped_bounds_pass": clamped_ok,
            "cases": rows,
        },
        tuple(notes),
    )


def criterion_4(seed: int) -> CriterionResult:
    rows = []
    ok = True
    for name, spec in FIXTURES.items():
        prof = fixture_profile(spec)
        rep = check_descent(prof)
        if not rep.applicable:
            rows.append({"complex": name, "applicable": False})
            continue
        ok &= rep.ok
        rows.append(
            {
                "complex": name,
                "applicable": True,
                "checks": len(rep.checks),
                "failed": [c._asdict() for c in rep.checks if not c.holds],
                "pass": rep.ok,
            }
        )
    k4 = fixture_profile(FIXTURES["k4"])
    mu0, mu1 = k4.mu
    equality = abs(mu0 - mu1 / (1 - mu1))
    eq_ok = abs(mu0 + 1 / 3) <= 1e-12 and equality <= 1e-12
    return CriterionResult(
        4,
        "spectral descent",
        ok and eq_ok,
        {"cases": rows, "k4_mu0": mu0, "k4_mu1": mu1, "k4_equality_residual": equality},
    )


def _ladder_diff(a, b) -> float:
    scale = max(float(np.max(np.abs(a.phi.values))), 1e-300)
    diff = 0.0
    for x, y in zip(a.components, b.components):
        diff = max(diff, float(np.max(np.abs(x.values - y.values))) / scale)
    return diff


def criterion_5(seed: int) -> CriterionResult:
    tol = 1e-8
    rows = []
    ident_ok = upper_ok = lower_ok = clamped_ok = True
    for ci, (name, spec) in enumerate(FIXTURES.items()):
        m = fixture(spec)[1]
        prof = fixture_profile(spec)
        for k in range(m.n):
            rng = _rng(seed, 5, ci, k)
            id1 = id2 = psi = 0.0
            up_fail = lo_fail = upc_fail = 0
            for _ in range(COCHAINS_PER_CASE):
                phi = project_C0(Cochain.random(m, k, rng))
                res = decompose(phi, solver="pinv")
                alt = decompose(phi, solver="lstsq")
                shifted = decompose(phi, solver="kernel-shift", rng=rng)
                rep = verify_decomposition(res, prof, tol=tol)
                id1 = max(id1, rep.identity1_residual)
                id2 = max(id2, rep.identity2_residual)
                psi = max(psi, _ladder_diff(res, alt), _ladder_diff(res, shifted))
                up_fail += not rep.cor_upper_pass
                lo_fail += not rep.cor_lower_pass
                upc_fail += not rep.cor_upper_clamped_pass
            good = id1 <= tol and id2 <= tol and psi <= tol
            ident_ok &= good
            upper_ok &= up_fail == 0
            lower_ok &= lo_fail == 0
            clamped_ok &= upc_fail == 0
            rows.append(
                {
                    "complex": name,
                    "k": k,
                    "identity1": id1,
                    "identity2": id2,
                    "psi_independence": psi,
                    "ladder_upper_violations": up_fail,
                    "ladder_lower_violations": lo_fail,
                    "ladder_upper_clamped_violations": upc_fail,
                    "pass": good and up_fail == 0 and lo_fail == 0,
                }
            )
    notes = []
    if not upper_ok:
        notes.append(
            "the upper bound with mu_j inherits the correction-sum defect when some mu_j < 0; "
            "with mu_j replaced by max(mu_j, 0) it holds"
        )
    return CriterionResult(
        5,
        "decomposition ladder",
        ident_ok and upper_ok and lower_ok,
        {
            "tolerance": tol,
            "cochains_per_case": COCHAINS_PER_CASE,
            "identities_pass": ident_ok,
            "ladder_upper_pass": upper_ok,
            "ladder_lower_pass": lower_ok,
            "ladder_upper_clamped_pass": clamped_ok,
            "cases": rows,
        },
        tuple(notes),
    )


def criterion_6(seed: int) -> CriterionResult:
    rows = []
    ok = True
    for name, spec in {**FIXTURES, **REGULAR_FIXTURES, **HIGH_DIM_FIXTURES}.items():
        prof = fixture_profile(spec)
        try:
            rep = check_mixing_bounds(prof, theorems=("lazy",))
        except MixingBoundViolation as exc:
            ok = False
            rows.append({"complex": name, "error": str(exc), "pass": False})
            continue
        ok &= rep.ok
        for r in rep.records:
            rows.append({"complex": name, "k": r.k, "achieved": r.achieved, "bound": r.bound, "pass": r.passed})
    desk = {}
    for name, k, want_a, want_b in (("triangle", 0, 1 / 4, 1 / 2), ("k4", 1, 1 / 3, 2 / 3)):
        prof = fixture_profile(FIXTURES[name])
        rec = next(r for r in check_mixing_bounds(prof, theorems=("lazy",)).records if r.k == k)
        good = abs(rec.achieved - want_a) <= 1e-10 and abs(rec.bound - want_b) <= 1e-10
        ok &= good
        desk[name] = {"k": k, "achieved": rec.achieved, "bound": rec.bound, "pass": good}
    return CriterionResult(6, "lazy upper-walk mixing", ok, {"cases": rows, "desk_values": desk})


def criterion_7(seed: int) -> CriterionResult:
    target = 2 / 3
    values = []
    for mm in range(5, 10):
        m = complete_complex(mm, 2)[1]
        values.append(second_eigenvalue_on_C0(assemble_upper_walk(m, 1)).top)
    monotone = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    gap = target - values[-1]
    ok = monotone and abs(gap) <= 0.15
    return CriterionResult(
        7,
        "optimality trend on complete complexes",
        ok,
        {"m": list(range(5, 10)), "second_eigenvalue": values, "monotone": monotone, "gap_at_m9": gap},
    )


def criterion_8(seed: int) -> CriterionResult:
    m = fixture(FIXTURES["k4"])[1]
    A = FaceSet.of(m, [(0, 1), (2, 3)])
    b = check_binary_mixing(A, fixture_profile(FIXTURES["k4"]))
    k4_ok = (
        b.passed
        and abs(b.achieved - 1 / math.sqrt(3)) <= 1e-10
        and abs(b.bound - 2 / math.sqrt(3)) <= 1e-10
    )
    rows = []
    ratios = []
    all_pass = True
    for name, spec in REGULAR_FIXTURES.items():
        _, mw, face_set, meta = fixture(spec)
        r = check_binary_mixing(face_set, _profile(mw))
        all_pass &= r.passed
        ratios.append(r.achieved)
        rows.append({"complex": name, "s": spec.params["s"], "matching_size": len(face_set), **r.to_json()})
    decreasing = all(b2 < a2 for a2, b2 in zip(ratios, ratios[1:]))
    return CriterionResult(
        8,
        "one-step mixing of binary cochains",
        k4_ok and all_pass and decreasing,
        {"k4": {**b.to_json(), "pass": k4_ok}, "regular": rows, "decreasing_in_s": decreasing},
    )


def criterion_9(seed: int) -> CriterionResult:
    rows = []
    violations = []
    for name, spec in HIGH_DIM_FIXTURES.items():
        prof = fixture_profile(spec)
        rep = check_mixing_bounds(prof, theorems=("nonlazy_one_sided",))
        for r in rep.records:
            if prof.n - r.k < 3:
                continue
            rows.append({"complex": name, "k": r.k, "achieved": r.achieved, "bound": r.bound, "pass": r.passed})
            if not r.passed:
                violations.append({"complex": name, "k": r.k})
    return CriterionResult(
        9,
        "non-lazy one-sided bound (advisory)",
        not violations,
        {"cases": rows, "violations": violations, "advisory": True},
    )


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_criterion(cid: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    return CRITERIA[cid](seed)


def run_suite(seed: int = DEFAULT_SEED, criteria: Iterable[int] | None = None) -> list[CriterionResult]:
    ids = sorted(criteria) if criteria is not None else sorted(CRITERIA)
    return [run_criterion(c, seed) for c in ids]


def fixture_metadata() -> dict:
    out = {}
    for name, spec in {**FIXTURES, **REGULAR_FIXTURES, **HIGH_DIM_FIXTURES}.items():
        out[name] = fixture(spec)[-1]
    return out
