"""Pure weighted simplicial complexes, the weight recursion, and links.

Faces are stored per dimension as sorted vertex tuples in lexicographic
order, so the position of a face in ``X.faces(k)`` is its canonical index
and every matrix built on top of a complex is reproducible.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionError,
    DimensionMismatchError,
    DomainError,
    DuplicateFaceError,
    MissingFaceError,
    PurityError,
)

__all__ = [
    "Simplex",
    "simplex",
    "SimplicialComplex",
    "WeightFunction",
    "Link",
    "ValidationReport",
    "build_from_top_faces",
    "homogeneous_weight",
    "validate",
    "link",
]

Simplex = tuple[int, ...]
EMPTY: Simplex = ()


def simplex(vertices: Iterable[int]) -> Simplex:
    """Normalize a vertex collection to a sorted tuple, rejecting repeats."""
    vs = [int(v) for v in vertices]
    if any(v < 0 for v in vs):
        raise DomainError(f"vertex ids must be non-negative, got {vs}")
    out = tuple(sorted(vs))
    if len(set(out)) != len(out):
        raise DomainError(f"repeated vertex in {vs}")
    return out


class SimplicialComplex:
    """A finite simplicial complex with canonical per-dimension indexing.

    The constructor takes faces verbatim (it does *not* close them
    downward) so that :func:`validate` can report closure and purity
    defects; use :meth:`from_top_faces` for the usual construction.
    """

    def __init__(self, faces: Iterable[Iterable[int]]):
        by_dim: dict[int, set[Simplex]] = {-1: {EMPTY}}
        for f in faces:
            s = simplex(f)
            by_dim.setdefault(len(s) - 1, set()).add(s)
        self.n = max(by_dim)
        self._faces = tuple(
            tuple(sorted(by_dim.get(k, ()))) for k in range(-1, self.n + 1)
        )
        self._index = tuple({s: i for i, s in enumerate(fs)} for fs in self._faces)
        self._incidence: dict[int, sp.csr_matrix] = {}
        self._tops_by_vertex: dict[int, list[int]] | None = None

    @classmethod
    def from_top_faces(cls, tops: Iterable[Iterable[int]]) -> SimplicialComplex:
        closure: set[Simplex] = set()
        for t in tops:
            s = simplex(t)
            for r in range(len(s) + 1):
                closure.update(combinations(s, r))
        return cls(closure)

    # -- lookup ----------------------------------------------------------
    def faces(self, k: int) -> tuple[Simplex, ...]:
        if not -1 <= k <= self.n:
            return ()
        return self._faces[k + 1]

    def size(self, k: int) -> int:
        return len(self.faces(k))

    def index(self, face: Iterable[int]) -> int:
        s = simplex(face)
        k = len(s) - 1
        try:
            return self._index[k + 1][s]
        except (IndexError, KeyError):
            raise MissingFaceError(f"{list(s)} is not a face of the complex") from None

    def __contains__(self, face: object) -> bool:
        try:
            self.index(face)  # type: ignore[arg-type]
        except (MissingFaceError, DomainError, TypeError):
            return False
        return True

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for (v,) in self.faces(0))

    @property
    def top_faces(self) -> tuple[Simplex, ...]:
        return self.faces(self.n)

    def __repr__(self) -> str:
        counts = ", ".join(str(self.size(k)) for k in range(self.n + 1))
        return f"SimplicialComplex(n={self.n}, f=({counts}))"

    # -- structure -------------------------------------------------------
    def closure_violations(self) -> list[tuple[Simplex, Simplex]]:
        """Pairs (face, missing codimension-one subface)."""
        bad = []
        for k in range(1, self.n + 1):
            below = self._index[k]
            for s in self.faces(k):
                for sub in combinations(s, k):
                    if sub not in below:
                        bad.append((s, sub))
        return bad

    def purity_violations(self) -> list[Simplex]:
        """Faces of dimension < n not contained in any n-face."""
        covered: set[Simplex] = set()
        for t in self.top_faces:
            for r in range(len(t)):
                covered.update(combinations(t, r))
        return [s for k in range(self.n) for s in self.faces(k) if s not in covered]

    def is_pure(self) -> bool:
        return not self.purity_violations() and not self.closure_violations()

    def incidence(self, k: int) -> sp.csr_matrix:
        """0/1 face incidence of shape |X(k+1)| x |X(k)|, for -1 <= k <= n-1."""
        if not -1 <= k <= self.n - 1:
            raise DimensionError(f"incidence needs -1 <= k <= {self.n - 1}, got {k}")
        if k not in self._incidence:
            rows, cols = [], []
            below = self._index[k + 1]
            for i, s in enumerate(self.faces(k + 1)):
                for sub in combinations(s, k + 1):
                    j = below.get(sub)
                    if j is None:
                        raise MissingFaceError(f"{list(sub)} (face of {list(s)}) missing")
                    rows.append(i)
                    cols.append(j)
            data = np.ones(len(rows))
            shape = (self.size(k + 1), self.size(k))
            self._incidence[k] = sp.csr_matrix((data, (rows, cols)), shape=shape)
        return self._incidence[k]

    def tops_containing(self, face: Simplex) -> list[Simplex]:
        if self._tops_by_vertex is None:
            tbv: dict[int, list[int]] = {}
            for i, t in enumerate(self.top_faces):
                for v in t:
                    tbv.setdefault(v, []).append(i)
            self._tops_by_vertex = tbv
        tops = self.top_faces
        if not face:
            return list(tops)
        candidates = self._tops_by_vertex.get(face[0], [])
        fs = set(face)
        return [tops[i] for i in candidates if fs.issubset(tops[i])]


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Positive weights on every face of ``complex``.

    ``values[k + 1]`` is aligned with ``complex.faces(k)``. Construction
    checks shape and positivity only; the coface-sum recursion is checked
    by :func:`validate`.
    """

    complex: SimplicialComplex
    values: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        X = self.complex
        if len(self.values) != X.n + 2:
            raise DimensionMismatchError(
                f"expected weights for dimensions -1..{X.n}, got {len(self.values)} arrays"
            )
        frozen = []
        for k, arr in enumerate(self.values, start=-1):
            a = np.array(arr, dtype=float)
            if a.shape != (X.size(k),):
                raise DimensionMismatchError(
                    f"dimension {k}: {a.shape} weights for {X.size(k)} faces"
                )
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise DomainError(f"dimension {k}: weights must be finite and > 0")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "values", tuple(frozen))

    @property
    def n(self) -> int:
        return self.complex.n

    def of(self, k: int) -> np.ndarray:
        return self.values[k + 1]

    def __getitem__(self, face: Iterable[int]) -> float:
        s = simplex(face)
        return float(self.values[len(s)][self.complex.index(s)])

    def total(self, k: int) -> float:
        """m(X(k))."""
        return float(self.of(k).sum())

    def replace(self, face: Iterable[int], value: float) -> WeightFunction:
        """Copy with a single face weight overwritten (no re-propagation)."""
        s = simplex(face)
        vals = [v.copy() for v in self.values]
        vals[len(s)][self.complex.index(s)] = value
        return WeightFunction(self.complex, tuple(vals))


def _propagate(X: SimplicialComplex, top: Sequence[Fraction]) -> list[list[Fraction]]:
    """Push top-face weights down the coface-sum recursion in exact arithmetic."""
    exact: list[list[Fraction]] = [[] for _ in range(X.n + 2)]
    exact[X.n + 1] = list(top)
    for k in range(X.n - 1, -2, -1):
        acc = [Fraction(0)] * X.size(k)
        inc = X.incidence(k).tocoo()
        upper = exact[k + 2]
        for i, j in zip(inc.row, inc.col):
            acc[j] += upper[i]
        exact[k + 1] = acc
    return exact


def build_from_top_faces(
    top: Iterable[tuple[Iterable[int], float]],
) -> tuple[SimplicialComplex, WeightFunction]:
    """Downward closure of weighted top faces; lower weights by coface sums."""
    entries = [(simplex(vs), w) for vs, w in top]
    if not entries:
        raise DimensionMismatchError("at least one top face is required")
    sizes = {len(s) for s, _ in entries}
    if len(sizes) != 1:
        raise DimensionMismatchError(f"top faces have mixed sizes {sorted(sizes)}")
    seen: set[Simplex] = set()
    for s, w in entries:
        if s in seen:
            raise DuplicateFaceError(f"top face {list(s)} listed twice")
        seen.add(s)
        if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0):
            raise DomainError(f"top face {list(s)}: weight must be positive, got {w!r}")
    X = SimplicialComplex.from_top_faces(s for s, _ in entries)
    given = dict(entries)
    top_exact = [Fraction(given[s]) for s in X.top_faces]
    exact = _propagate(X, top_exact)
    return X, WeightFunction(X, tuple(np.array([float(x) for x in e]) for e in exact))


def homogeneous_weight(X: SimplicialComplex) -> WeightFunction:
    """m_h(tau) = (n-k)! * #{n-faces containing tau}, in integer arithmetic."""
    if X.purity_violations() or X.closure_violations():
        raise PurityError("homogeneous weight requires a pure, downward-closed complex")
    counts = [dict.fromkeys(X.faces(k), 0) for k in range(-1, X.n + 1)]
    for t in X.top_faces:
        for r in range(len(t) + 1):
            for sub in combinations(t, r):
                counts[r][sub] += 1
    vals = []
    for k in range(-1, X.n + 1):
        f = math.factorial(X.n - k)
        vals.append(np.array([float(f * counts[k + 1][s]) for s in X.faces(k)]))
    return WeightFunction(X, tuple(vals))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`. Residuals are relative and computed exactly."""

    recursion_residuals: tuple[float, ...]  # per k = -1..n-1
    recursion_worst: tuple[Simplex | None, ...]
    coface_sum_residual: float  # all k < l
    totals_residual: float  # m(X(k)) against m(X(l))
    closure_violations: tuple[tuple[Simplex, Simplex], ...]
    purity_violations: tuple[Simplex, ...]

    @property
    def ok(self) -> bool:
        return (
            max(self.recursion_residuals, default=0.0) == 0.0
            and self.coface_sum_residual == 0.0
            and self.totals_residual == 0.0
            and not self.closure_violations
            and not self.purity_violations
        )

    def max_residual(self) -> float:
        return max((*self.recursion_residuals, self.coface_sum_residual, self.totals_residual))

    def to_json(self) -> dict:
        return {
            "recursion_residuals": [
                {"k": k, "residual": r, "worst_face": list(f) if f is not None else None}
                for k, (r, f) in enumerate(
                    zip(self.recursion_residuals, self.recursion_worst), start=-1
                )
            ],
            "coface_sum_residual": self.coface_sum_residual,
            "totals_residual": self.totals_residual,
            "closure_violations": [[list(a), list(b)] for a, b in self.closure_violations],
            "purity_violations": [list(s) for s in self.purity_violations],
            "ok": self.ok,
        }


def _rel(a: Fraction, b: Fraction) -> Fraction:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else Fraction(0)


def validate(X: SimplicialComplex, m: WeightFunction) -> ValidationReport:
    """Check closure, purity, the weight recursion and its integrated forms.

    Weights are lifted to exact rationals (every double is one), so integer
    weight functions give residuals that are exactly zero.
    """
    closure = tuple(X.closure_violations())
    purity = tuple(X.purity_violations())
    exact = [[Fraction(float(x)) for x in m.of(k)] for k in range(-1, X.n + 1)]

    rec_res, rec_worst = [], []
    for k in range(-1, X.n):
        acc = [Fraction(0)] * X.size(k)
        idx = X._index[k + 1]
        for sigma, w in zip(X.faces(k + 1), exact[k + 2]):
            for sub in combinations(sigma, k + 1):
                j = idx.get(sub)
                if j is not None:
                    acc[j] += w
        worst, worst_face = Fraction(0), None
        for face, got, want in zip(X.faces(k), exact[k + 1], acc):
            r = _rel(got, want)
            if r > worst:
                worst, worst_face = r, face
        rec_res.append(float(worst))
        rec_worst.append(worst_face)

    # (1/(l-k)!) m(tau) = sum over l-faces containing tau, by direct subset enumeration
    cof_res = Fraction(0)
    for l in range(0, X.n + 1):
        sums = [dict.fromkeys(X.faces(k), Fraction(0)) for k in range(-1, l)]
        for sigma, w in zip(X.faces(l), exact[l + 1]):
            for r in range(l + 1):
                for sub in combinations(sigma, r):
                    if sub in sums[r]:
                        sums[r][sub] += w
        for k in range(-1, l):
            f = math.factorial(l - k)
            for face, got in zip(X.faces(k), exact[k + 1]):
                cof_res = max(cof_res, _rel(got, f * sums[k + 1][face]))

    tot = [sum(e, Fraction(0)) for e in exact]
    tot_res = Fraction(0)
    for k in range(-1, X.n + 1):
        for l in range(k + 1, X.n + 1):
            ratio = Fraction(math.factorial(l + 1), math.factorial(k + 1))
            tot_res = max(tot_res, _rel(tot[k + 1], ratio * tot[l + 1]))

    return ValidationReport(
        recursion_residuals=tuple(rec_res),
        recursion_worst=tuple(rec_worst),
        coface_sum_residual=float(cof_res),
        totals_residual=float(tot_res),
        closure_violations=closure,
        purity_violations=purity,
    )


@dataclass(frozen=True, eq=False)
class Link:
    """The link of ``base`` with its induced weights.

    ``parent_index[l + 1][i]`` is the index in X(|base| + l) of
    ``base ∪ link.faces(l)[i]``.
    """

    base: Simplex
    complex: SimplicialComplex
    weights: WeightFunction
    parent_index: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return self.complex.n

    def to_parent(self, face: Simplex) -> Simplex:
        return tuple(sorted(self.base + tuple(face)))


def link(X: SimplicialComplex, m: WeightFunction, tau: Iterable[int]) -> Link:
    """Link of ``tau`` with m_tau(eta) = m(tau ∪ eta). Cached on ``m``."""
    if m.complex is not X:
        raise ValueError("weight function belongs to a different complex")
    t = simplex(tau)
    cache = m._cache.setdefault("links", {})
    if t in cache:
        return cache[t]
    k = len(t) - 1
    X.index(t)  # raises MissingFaceError
    if k > X.n - 1:
        raise DimensionError(f"link of a top face {list(t)} is empty")
    if not t:
        ids = tuple(np.arange(X.size(j)) for j in range(-1, X.n + 1))
        lk = Link(t, X, m, ids)
    else:
        ts = set(t)
        tops = [tuple(v for v in s if v not in ts) for s in X.tops_containing(t)]
        L = SimplicialComplex.from_top_faces(tops)
        parent = []
        vals = []
        for l in range(-1, L.n + 1):
            lookup = X._index[k + l + 2]
            idx = np.array(
                [lookup[tuple(sorted(t + eta))] for eta in L.faces(l)], dtype=np.intp
            )
            parent.append(idx)
            vals.append(m.of(k + l + 1)[idx])
        lk = Link(t, L, WeightFunction(L, tuple(vals)), tuple(parent))
    cache[t] = lk
    return lk
