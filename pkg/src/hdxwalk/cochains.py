"""Non-oriented cochains with the weighted inner product, and localization."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .complex import Simplex, WeightFunction, link, simplex
from .errors import DimensionError, DimensionMismatchError, MissingFaceError

__all__ = [
    "Cochain",
    "inner_product",
    "norm",
    "project_C0",
    "c0_residual",
    "localize",
    "LocalizationResiduals",
    "check_localization_identities",
]


@dataclass(frozen=True, eq=False)
class Cochain:
    """A real function on X(k), stored densely in canonical face order."""

    weights: WeightFunction
    k: int
    values: np.ndarray

    def __post_init__(self):
        X = self.weights.complex
        if not -1 <= self.k <= X.n:
            raise DimensionError(f"no faces of dimension {self.k} in a {X.n}-complex")
        v = np.array(self.values, dtype=float)
        if v.shape != (X.size(self.k),):
            raise DimensionMismatchError(
                f"{v.shape[0] if v.ndim == 1 else v.shape} values for {X.size(self.k)} faces"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("cochain values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # constructors
    @classmethod
    def constant(cls, m: WeightFunction, k: int, c: float = 1.0) -> Cochain:
        return cls(m, k, np.full(m.complex.size(k), float(c)))

    @classmethod
    def zeros(cls, m: WeightFunction, k: int) -> Cochain:
        return cls.constant(m, k, 0.0)

    @classmethod
    def from_mapping(cls, m: WeightFunction, k: int, entries: Mapping) -> Cochain:
        """Faces not listed are 0."""
        X = m.complex
        vals = np.zeros(X.size(k))
        for face, value in entries.items():
            s = simplex(face)
            if len(s) != k + 1:
                raise DimensionMismatchError(f"{list(s)} is not a {k}-face")
            vals[X.index(s)] = value
        return cls(m, k, vals)

    @classmethod
    def indicator(cls, m: WeightFunction, k: int, faces: Iterable) -> Cochain:
        return cls.from_mapping(m, k, {simplex(f): 1.0 for f in faces})

    @classmethod
    def random(cls, m: WeightFunction, k: int, rng: np.random.Generator) -> Cochain:
        return cls(m, k, rng.standard_normal(m.complex.size(k)))

    @property
    def complex(self):
        return self.weights.complex

    def __getitem__(self, face) -> float:
        return float(self.values[self.complex.index(face)])

    def norm(self) -> float:
        return norm(self)

    def _like(self, values) -> Cochain:
        return Cochain(self.weights, self.k, values)

    def _check(self, other: Cochain) -> None:
        if other.weights is not self.weights and other.complex is not self.complex:
            raise DimensionMismatchError("cochains live on different complexes")
        if other.k != self.k:
            raise DimensionMismatchError(f"dimension {self.k} vs {other.k}")

    def __add__(self, other: Cochain) -> Cochain:
        self._check(other)
        return self._like(self.values + other.values)

    def __sub__(self, other: Cochain) -> Cochain:
        self._check(other)
        return self._like(self.values - other.values)

    def __mul__(self, c: float) -> Cochain:
        return self._like(self.values * float(c))

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> Cochain:
        return self._like(self.values / float(c))

    def __neg__(self) -> Cochain:
        return self._like(-self.values)

    def __repr__(self) -> str:
        return f"Cochain(k={self.k}, size={self.values.size})"


def inner_product(phi: Cochain, psi: Cochain) -> float:
    phi._check(psi)
    return float(np.dot(phi.weights.of(phi.k) * phi.values, psi.values))


def norm(phi: Cochain) -> float:
    return math.sqrt(max(inner_product(phi, phi), 0.0))


def project_C0(phi: Cochain) -> Cochain:
    """Weighted-orthogonal projection onto the complement of the constants."""
    w = phi.weights.of(phi.k)
    if w.size == 1:
        # C^k_0 = {0}; w*v/w need not round back to v
        return phi._like(np.zeros(1))
    mean = float(np.dot(w, phi.values) / w.sum())
    return phi._like(phi.values - mean)


def c0_residual(phi: Cochain) -> float:
    """|<phi, 1>| / (||phi|| ||1||); zero exactly on C^k_0."""
    w = phi.weights.of(phi.k)
    scale = norm(phi) * math.sqrt(w.sum())
    if scale == 0.0:
        return 0.0
    return abs(float(np.dot(w, phi.values))) / scale


def localize(phi: Cochain, tau: Iterable[int]) -> Cochain:
    """phi_tau(eta) = phi(tau ∪ eta) as a cochain on the link of tau."""
    t = simplex(tau)
    k = len(t) - 1
    l = phi.k
    if k >= l:
        raise DimensionError(f"localizing a {l}-cochain needs dim(tau) < {l}, got {k}")
    X, m = phi.complex, phi.weights
    if t not in X:
        raise MissingFaceError(f"{list(t)} is not a face of the complex")
    lk = link(X, m, t)
    j = l - k - 1
    return Cochain(lk.weights, j, phi.values[lk.parent_index[j + 1]])


class LocalizationResiduals(NamedTuple):
    """Relative residuals of the three localization identities.

    ``differential`` is None when phi has top dimension (not applicable).
    """

    norm: float
    codifferential: float
    differential: float | None


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def check_localization_identities(phi: Cochain, k: int) -> LocalizationResiduals:
    """Compare global norms of phi, d*phi, d phi with sums over links.

    - C(l+1, k+1) ||phi||^2 = sum over tau in X(k) of ||phi_tau||^2
    - C(l, k+1) ||d* phi||^2 = sum over tau in X(k) of ||d*_tau phi_tau||^2
    - ||d phi||^2 = sum over tau in X(l-1) of ||d_tau phi_tau||^2 - l/(l+1) ||phi_tau||^2
    """
    from .operators import assemble_codifferential, assemble_differential

    l = phi.k
    X, m = phi.complex, phi.weights
    if not -1 <= k < l <= X.n:
        raise DimensionError(f"need -1 <= k < l <= n, got k={k}, l={l}")

    lhs1 = math.comb(l + 1, k + 1) * norm(phi) ** 2
    rhs1 = 0.0
    rhs2 = 0.0
    for tau in X.faces(k):
        pt = localize(phi, tau)
        rhs1 += norm(pt) ** 2
        dstar = assemble_codifferential(pt.weights, pt.k - 1)
        rhs2 += norm(dstar(pt)) ** 2
    dstar_phi = assemble_codifferential(m, l - 1)(phi)
    lhs2 = math.comb(l, k + 1) * norm(dstar_phi) ** 2

    third = None
    if l < X.n:
        lhs3 = norm(assemble_differential(m, l)(phi)) ** 2
        rhs3 = 0.0
        for tau in X.faces(l - 1):
            pt = localize(phi, tau)
            d_t = assemble_differential(pt.weights, 0)
            rhs3 += norm(d_t(pt)) ** 2 - l / (l + 1) * norm(pt) ** 2
        third = _rel(lhs3, rhs3)
    return LocalizationResiduals(_rel(lhs1, rhs1), _rel(lhs2, rhs2), third)
