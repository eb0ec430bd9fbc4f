"""Mixing bounds for the upper walks and one-step mixing of indicator cochains."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .cochains import Cochain, norm
from .complex import Simplex, WeightFunction, simplex
from .errors import DimensionMismatchError, DomainError, MissingFaceError, MixingBoundViolation
from .operators import OperatorMatrix, assemble_nonlazy_upper, assemble_upper_walk
from .spectra import SpectralProfile

__all__ = [
    "THEOREMS",
    "THEOREM_ALIASES",
    "C0Spectrum",
    "second_eigenvalue_on_C0",
    "MixingRecord",
    "MixingReport",
    "check_mixing_bounds",
    "FaceSet",
    "local_thinness",
    "BinaryMixing",
    "check_binary_mixing",
]

MIX_TOL = 1e-10

# check identifiers; numeric aliases are accepted on the command line
THEOREMS = ("lazy", "nonlazy_two_sided", "nonlazy_one_sided", "binary")
THEOREM_ALIASES = {
    "6.5.1": "lazy",
    "6.5.2": "nonlazy_two_sided",
    "6.6": "nonlazy_one_sided",
    "7.3": "binary",
}


class C0Spectrum(NamedTuple):
    top: float
    bottom: float


def _deflated(op: OperatorMatrix) -> np.ndarray:
    """Eigenvalues (ascending) of op restricted to the weighted complement of constants."""
    w = np.sqrt(op.weights.of(op.k))
    S = op.symmetrized()
    S = 0.5 * (S + S.T)
    u = (w / np.linalg.norm(w))[None, :]
    Q = scipy.linalg.null_space(u)  # orthonormal basis of {x : <x, sqrt(m)> = 0}
    return np.linalg.eigvalsh(Q.T @ S @ Q)


def second_eigenvalue_on_C0(op: OperatorMatrix) -> C0Spectrum:
    """Extremal eigenvalues of a walk on C^k_0 (the constant eigenvalue 1 removed)."""
    if op.kind not in ("upper", "nonlazy"):
        raise ValueError(f"expected an upper walk, got {op.kind!r}")
    ev = _deflated(op)
    if ev.size == 0:
        return C0Spectrum(float("nan"), float("nan"))
    return C0Spectrum(float(ev[-1]), float(ev[0]))


class MixingRecord(NamedTuple):
    theorem_id: str
    k: int
    achieved: float
    bound: float
    margin: float
    passed: bool
    advisory: bool

    def to_json(self) -> dict:
        d = self._asdict()
        d["pass"] = d.pop("passed")
        return d


@dataclass(frozen=True)
class MixingReport:
    records: tuple[MixingRecord, ...]
    lambda_one_sided: float
    lambda_two_sided: float

    @property
    def ok(self) -> bool:
        """All non-advisory records pass."""
        return all(r.passed for r in self.records if not r.advisory)

    def to_json(self) -> dict:
        return {
            "lambda_one_sided": self.lambda_one_sided,
            "lambda_two_sided": self.lambda_two_sided,
            "records": [r.to_json() for r in self.records],
            "ok": self.ok,
        }


def _record(tid: str, k: int, achieved: float, bound: float, advisory: bool = False) -> MixingRecord:
    return MixingRecord(tid, k, achieved, bound, bound - achieved, achieved <= bound + MIX_TOL, advisory)


def check_mixing_bounds(
    prof: SpectralProfile,
    theorems: Iterable[str] = ("lazy", "nonlazy_two_sided", "nonlazy_one_sided"),
    lambda_override: tuple[float, float] | None = None,
) -> MixingReport:
    """Compare spectra of the upper walks on C^k_0 with the proven bounds.

    lambda defaults to the measured one-/two-sided values from ``prof``;
    ``lambda_override`` replaces them with (one_sided, two_sided).
    The one-sided non-lazy bound is reported as advisory.
    """
    m = prof.weights
    n = prof.n
    lam1, lam2 = lambda_override or (prof.lambda_one_sided, prof.lambda_two_sided)
    wanted = {THEOREM_ALIASES.get(t, t) for t in theorems}
    unknown = wanted - set(THEOREMS)
    if unknown:
        raise ValueError(f"unknown theorem ids {sorted(unknown)}")
    records: list[MixingRecord] = []
    for k in range(n):
        if "lazy" in wanted:
            top = second_eigenvalue_on_C0(assemble_upper_walk(m, k)).top
            bound = (k + 1) / (k + 2) + (k + 1) * lam1
            rec = _record("lazy", k, top, bound)
            if not rec.passed and bound < 1 and lambda_override is None:
                raise MixingBoundViolation(
                    f"M+_{k}: second eigenvalue {top!r} exceeds {bound!r} at measured lambda {lam1!r}"
                )
            records.append(rec)
        if wanted & {"nonlazy_two_sided", "nonlazy_one_sided"}:
            spec = second_eigenvalue_on_C0(assemble_nonlazy_upper(m, k))
            achieved = max(abs(spec.top), abs(spec.bottom))
        if "nonlazy_two_sided" in wanted:
            records.append(_record("nonlazy_two_sided", k, achieved, k / (k + 1) + (k + 1) * lam2))
            # the proof's lower estimate <M' phi, phi> >= -(k+1) lambda ||phi||^2
            records.append(_record("nonlazy_two_sided_lower", k, -spec.bottom, (k + 1) * lam2))
        if "nonlazy_one_sided" in wanted and 2 * (n - k - 1) - 1 > 0:
            bound = max(k / (k + 1) + (k + 1) * lam1, 2 * (k + 1) / (2 * (n - k - 1) - 1))
            records.append(_record("nonlazy_one_sided", k, achieved, bound, advisory=True))
    return MixingReport(tuple(records), lam1, lam2)


# -- binary cochains ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FaceSet:
    """A nonempty set of k-faces of ``weights.complex``."""

    weights: WeightFunction
    k: int
    faces: tuple[Simplex, ...]

    def __post_init__(self):
        X = self.weights.complex
        fs = tuple(sorted({simplex(f) for f in self.faces}))
        if not fs:
            raise DomainError("face set is empty")
        for f in fs:
            if len(f) != self.k + 1:
                raise DimensionMismatchError(f"{list(f)} is not a {self.k}-face")
            if f not in X:
                raise MissingFaceError(f"{list(f)} is not a face of the complex")
        object.__setattr__(self, "faces", fs)

    @classmethod
    def of(cls, m: WeightFunction, faces: Iterable) -> FaceSet:
        fs = [simplex(f) for f in faces]
        if not fs:
            raise DomainError("face set is empty")
        return cls(m, len(fs[0]) - 1, tuple(fs))

    def indicator(self) -> Cochain:
        return Cochain.indicator(self.weights, self.k, self.faces)

    def __len__(self) -> int:
        return len(self.faces)


def local_thinness(A: FaceSet) -> float:
    """F(A): the largest average, over a member's (k-1)-faces eta, of m(A near eta)/m(eta)."""
    m, k = A.weights, A.k
    X = m.complex
    members = set(A.faces)
    inc = X.incidence(k - 1).tocsc()
    faces_k = X.faces(k)
    wk, wkm = m.of(k), m.of(k - 1)
    share: dict[Simplex, float] = {}
    for tau in A.faces:
        for j in range(len(tau)):
            eta = tau[:j] + tau[j + 1 :]
            if eta in share:
                continue
            e = X._index[k][eta]
            cof = inc.indices[inc.indptr[e] : inc.indptr[e + 1]]
            share[eta] = math.fsum(wk[c] for c in cof if faces_k[c] in members) / wkm[e]
    return max(
        math.fsum(share[tau[:j] + tau[j + 1 :]] for j in range(len(tau))) / (k + 1)
        for tau in A.faces
    )


class BinaryMixing(NamedTuple):
    achieved: float  # ||M+ chi_A|| / ||chi_A||
    bound: float  # 1/sqrt(k+2) + sqrt(F(A) + lambda)
    passed: bool
    thinness: float
    lam: float

    def to_json(self) -> dict:
        d = self._asdict()
        d["pass"] = d.pop("passed")
        return d


def check_binary_mixing(
    A: FaceSet, prof: SpectralProfile, lambda_override: float | None = None
) -> BinaryMixing:
    m, k = A.weights, A.k
    if prof.weights is not m:
        raise ValueError("profile and face set belong to different weight functions")
    lam = prof.lambda_one_sided if lambda_override is None else lambda_override
    chi = A.indicator()
    achieved = norm(assemble_upper_walk(m, k)(chi)) / norm(chi)
    eps = local_thinness(A)
    bound = 1 / math.sqrt(k + 2) + math.sqrt(eps + lam)
    return BinaryMixing(achieved, bound, achieved <= bound + MIX_TOL, eps, lam)
