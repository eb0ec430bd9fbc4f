"""Local spectra of links, expansion classification and the Garland sum."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .cochains import Cochain, localize, norm
from .complex import Simplex, WeightFunction, link, simplex
from .errors import DimensionError, EmptyLinkError
from .operators import (
    assemble_codifferential,
    assemble_differential,
    assemble_lower_walk,
    assemble_nonlazy_upper,
)

__all__ = [
    "LinkSpectrum",
    "LevelSpectrum",
    "SpectralProfile",
    "link_mu_nu",
    "profile",
    "GarlandTerms",
    "garland_sum",
    "garland_terms",
    "DescentReport",
    "check_descent",
    "worker_count",
]

DESCENT_TOL = 1e-12


def worker_count() -> int:
    """Parallelism bound from HDX_THREADS (0 or unset means automatic)."""
    try:
        n = int(os.environ.get("HDX_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


class LinkSpectrum(NamedTuple):
    face: Simplex
    mu: float
    nu: float
    connected: bool


def _is_connected(m_link: WeightFunction) -> bool:
    L = m_link.complex
    inc = L.incidence(0)  # edges x vertices
    adj = (inc.T @ inc).tocsr()
    ncomp, _ = connected_components(sp.csr_matrix(adj), directed=False)
    return ncomp == 1


def link_mu_nu(m: WeightFunction, tau) -> LinkSpectrum:
    """Second-largest and smallest eigenvalue of the link's non-lazy walk on vertices."""
    X = m.complex
    t = simplex(tau)
    if len(t) - 1 >= X.n - 1:
        raise EmptyLinkError(f"link of {list(t)} has no edges")
    lk = link(X, m, t)
    ev = assemble_nonlazy_upper(lk.weights, 0).eigenvalues()
    mu = float(ev[-2]) if ev.size > 1 else float("nan")
    return LinkSpectrum(t, mu, float(ev[0]), _is_connected(lk.weights))


class LevelSpectrum(NamedTuple):
    k: int
    mu: float
    nu: float
    argmax_face: Simplex
    argmin_face: Simplex
    links: tuple[LinkSpectrum, ...]


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """mu_k, nu_k for k = 0..n-1, aggregated over links of (k-1)-faces."""

    weights: WeightFunction
    levels: tuple[LevelSpectrum, ...]

    @property
    def n(self) -> int:
        return self.weights.complex.n

    @property
    def mu(self) -> tuple[float, ...]:
        return tuple(lv.mu for lv in self.levels)

    @property
    def nu(self) -> tuple[float, ...]:
        return tuple(lv.nu for lv in self.levels)

    @property
    def connected(self) -> bool:
        return all(s.connected for lv in self.levels for s in lv.links)

    @property
    def lambda_one_sided(self) -> float:
        return max(0.0, *self.mu)

    @property
    def lambda_two_sided(self) -> float:
        return max(self.lambda_one_sided, *(-v for v in self.nu))

    def is_one_sided(self, lam: float) -> bool:
        if not self.connected and lam < 1:
            return False
        return self.lambda_one_sided <= lam

    def is_two_sided(self, lam: float) -> bool:
        if not self.connected and lam < 1:
            return False
        return self.lambda_two_sided <= lam

    def to_json(self) -> dict:
        return {
            "levels": [
                {
                    "k": lv.k,
                    "mu_k": lv.mu,
                    "nu_k": lv.nu,
                    "argmax_face": list(lv.argmax_face),
                    "argmin_face": list(lv.argmin_face),
                    "disconnected_links": [list(s.face) for s in lv.links if not s.connected],
                }
                for lv in self.levels
            ],
            "classification": {
                "lambda_one_sided": self.lambda_one_sided,
                "lambda_two_sided": self.lambda_two_sided,
                "connected": self.connected,
            },
        }


def profile(m: WeightFunction, workers: int | None = None) -> SpectralProfile:
    """Per-link spectra for every face of dimension -1..n-2, reduced in canonical order."""
    X = m.complex
    if X.n < 1:
        raise DimensionError("spectral profile needs a complex of dimension >= 1")
    workers = workers or worker_count()
    faces = [f for k in range(X.n) for f in X.faces(k - 1)]
    # build links serially: the link cache on m is not thread-safe
    for f in faces:
        link(X, m, f)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        spectra = list(pool.map(lambda f: link_mu_nu(m, f), faces))
    levels = []
    pos = 0
    for k in range(X.n):
        cnt = X.size(k - 1)
        chunk = tuple(spectra[pos : pos + cnt])
        pos += cnt
        mus = np.array([s.mu for s in chunk])
        nus = np.array([s.nu for s in chunk])
        imax, imin = int(np.argmax(mus)), int(np.argmin(nus))
        levels.append(
            LevelSpectrum(k, float(mus[imax]), float(nus[imin]), chunk[imax].face, chunk[imin].face, chunk)
        )
    return SpectralProfile(m, tuple(levels))


# -- the Garland correction sum --------------------------------------------

class _LinkBlock(NamedTuple):
    face: Simplex
    rows: np.ndarray  # indices in X(k) of tau ∪ {v}, v a link vertex
    w: np.ndarray  # link vertex weights
    K: np.ndarray  # (M')_{tau,0} (I - M-_{tau,0}), dense


def _blocks(m: WeightFunction, k: int) -> list[_LinkBlock]:
    cache = m._cache.setdefault("garland", {})
    if k not in cache:
        X = m.complex
        out = []
        for tau in X.faces(k - 1):
            lk = link(X, m, tau)
            Mp = assemble_nonlazy_upper(lk.weights, 0).dense()
            Mm = assemble_lower_walk(lk.weights, 0).dense()
            K = Mp @ (np.eye(Mp.shape[0]) - Mm)
            out.append(_LinkBlock(tau, lk.parent_index[1], lk.weights.of(0), K))
        cache[k] = out
    return cache[k]


def garland_sum(m: WeightFunction, k: int, values: np.ndarray) -> np.ndarray:
    """Per-link terms <(M')(I - M-) phi_tau, phi_tau> for each tau in X(k-1).

    ``values`` may be (|X(k)|,) or (|X(k)|, batch); the result has shape
    (|X(k-1)|,) or (|X(k-1)|, batch).
    """
    X = m.complex
    if not 0 <= k <= X.n - 1:
        raise DimensionError(f"Garland sum needs 0 <= k <= {X.n - 1}, got {k}")
    blocks = _blocks(m, k)
    terms = []
    for b in blocks:
        loc = values[b.rows]
        terms.append(np.einsum("i...,i,i...->...", b.K @ loc, b.w, loc))
    return np.array(terms)


class GarlandTerms(NamedTuple):
    per_face: tuple[tuple[Simplex, float], ...]
    total: float
    identity_residual: float  # ||d phi||^2 = ||d* phi||^2 + ||phi||^2 + total
    lower_bound: float  # (k+1) nu_k ||phi||^2
    upper_bound: float  # (k+1) mu_k ||phi||^2, as stated
    bounds_hold: bool
    clamped_upper_bound: float  # (k+1) max(mu_k, 0) ||phi||^2
    clamped_bounds_hold: bool


def garland_terms(phi: Cochain, prof: SpectralProfile | None = None, tol: float = 1e-10) -> GarlandTerms:
    """Garland correction sum by explicit localization to each link.

    This path builds phi_tau with :func:`localize` and applies the link
    operators one face at a time; :func:`garland_sum` is the batched
    equivalent used inside the decomposition.
    """
    m, k = phi.weights, phi.k
    X = m.complex
    if not 0 <= k <= X.n - 1:
        raise DimensionError(f"Garland terms need 0 <= k <= {X.n - 1}, got {k}")
    prof = prof or profile(m)
    per = []
    for tau in X.faces(k - 1):
        pt = localize(phi, tau)
        mp = assemble_nonlazy_upper(pt.weights, 0)
        mm = assemble_lower_walk(pt.weights, 0)
        inner = mp(pt - mm(pt))
        per.append((tau, float(np.dot(pt.weights.of(0) * inner.values, pt.values))))
    total = math.fsum(v for _, v in per)
    n2 = norm(phi) ** 2
    dphi = norm(assemble_differential(m, k)(phi)) ** 2
    dstar = norm(assemble_codifferential(m, k - 1)(phi)) ** 2
    rhs = dstar + n2 + total
    scale = max(abs(dphi), abs(rhs), n2)
    resid = abs(dphi - rhs) / scale if scale else 0.0
    lo = (k + 1) * prof.nu[k] * n2
    hi = (k + 1) * prof.mu[k] * n2
    # the stated upper bound needs mu_k >= 0: for negative mu_k, the
    # locally-constant part of phi_tau contributes 0, not mu_k ||.||^2
    hi_c = (k + 1) * max(prof.mu[k], 0.0) * n2
    ok = lo - tol * n2 <= total <= hi + tol * n2
    ok_c = lo - tol * n2 <= total <= hi_c + tol * n2
    return GarlandTerms(tuple(per), total, resid, lo, hi, ok, hi_c, ok_c)


# -- spectral descent -------------------------------------------------------

class DescentCheck(NamedTuple):
    relation: str  # "step" (consecutive levels) or "chain" (from the top level)
    quantity: str  # "mu" or "nu"
    k: int
    value: float
    bound: float | None  # None when the bound is vacuous at this k
    holds: bool


@dataclass(frozen=True)
class DescentReport:
    applicable: bool
    checks: tuple[DescentCheck, ...]
    certified_one_sided: float | None  # smallest lambda the top-level test certifies
    certified_two_sided: float | None
    cross_check_ok: bool

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks) and self.cross_check_ok

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "checks": [c._asdict() for c in self.checks],
            "certified_lambda_one_sided": self.certified_one_sided,
            "certified_lambda_two_sided": self.certified_two_sided,
            "cross_check_ok": self.cross_check_ok,
            "ok": self.ok,
        }


def _ratio(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def _certified(x: float, n: int) -> float | None:
    """Least lambda in (0, 1] with x <= lambda/(1 + (n-1) lambda); 0 if x <= 0."""
    if x <= 0:
        return 0.0
    den = 1 - (n - 1) * x
    if den <= 0:
        return None
    lam = x / den
    return lam if lam <= 1 else None


def check_descent(prof: SpectralProfile, tol: float = DESCENT_TOL) -> DescentReport:
    """Descent inequalities between mu_k, nu_k and the top-level certification.

    Requires every link of dimension >= 1 to be connected; otherwise the
    report is marked not applicable and carries no checks.
    """
    n = prof.n
    if not prof.connected:
        return DescentReport(False, (), None, None, True)
    mu, nu = prof.mu, prof.nu
    checks = []
    for k in range(n - 1):
        b = _ratio(mu[k + 1], 1 - mu[k + 1])
        checks.append(DescentCheck("step", "mu", k, mu[k], b, b is None or mu[k] <= b + tol))
        b = _ratio(nu[k + 1], 1 - nu[k + 1])
        checks.append(DescentCheck("step", "nu", k, nu[k], b, b is None or nu[k] >= b - tol))
        b = _ratio(mu[n - 1], 1 - (n - 1 - k) * mu[n - 1])
        checks.append(DescentCheck("chain", "mu", k, mu[k], b, b is None or mu[k] <= b + tol))
        b = _ratio(nu[n - 1], 1 - (n - 1 - k) * nu[n - 1])
        checks.append(DescentCheck("chain", "nu", k, nu[k], b, b is None or nu[k] >= b - tol))

    one = _certified(mu[n - 1], n)
    two_parts = (_certified(mu[n - 1], n), _certified(-nu[n - 1], n))
    two = None if None in two_parts else max(two_parts)  # type: ignore[type-var]
    cross = True
    if one is not None:
        cross &= max(mu) <= one + tol
    if two is not None:
        cross &= max(max(mu), max(-v for v in nu)) <= two + tol
    return DescentReport(True, tuple(checks), one, two, bool(cross))
