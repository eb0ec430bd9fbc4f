"""Upper/lower random walks and the signless differential as matrices.

Every operator is assembled sparse from the face incidence and applied
matrix-free; ``dense()`` materializes it for eigensolvers. Walks are
assembled directly from their transition formulas, never from the
d*d / dd* factorizations, so :func:`verify_factorizations` compares two
independent constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .cochains import Cochain, norm
from .complex import WeightFunction
from .errors import DimensionError, UndefinedRatioError

__all__ = [
    "KINDS",
    "OperatorMatrix",
    "assemble_upper_walk",
    "assemble_lower_walk",
    "assemble_nonlazy_upper",
    "assemble_differential",
    "assemble_codifferential",
    "assemble_upper_laplacian",
    "operator",
    "FactorizationReport",
    "verify_factorizations",
    "bound_from_differential_norm",
    "dump_operator",
]

KINDS = ("upper", "lower", "nonlazy", "d", "dstar", "laplacian")


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A linear map between cochain spaces of ``weights.complex``.

    For ``d`` the map is C^k -> C^(k+1); for ``dstar`` it is its weighted
    adjoint C^(k+1) -> C^k. The walks act on C^k.
    """

    kind: str
    k: int
    weights: WeightFunction
    matrix: sp.csr_matrix

    @property
    def source_dim(self) -> int:
        return self.k + 1 if self.kind == "dstar" else self.k

    @property
    def target_dim(self) -> int:
        return self.k + 1 if self.kind == "d" else self.k

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def __call__(self, phi: Cochain) -> Cochain:
        if phi.k != self.source_dim:
            raise DimensionError(f"{self.kind} acts on {self.source_dim}-cochains, got {phi.k}")
        return Cochain(self.weights, self.target_dim, self.matrix @ phi.values)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def symmetrized(self) -> np.ndarray:
        """D_target^{1/2} M D_source^{-1/2}; symmetric for the self-adjoint walks."""
        wt = np.sqrt(self.weights.of(self.target_dim))
        ws = np.sqrt(self.weights.of(self.source_dim))
        return (wt[:, None] * self.dense()) / ws[None, :]

    def eigenvalues(self) -> np.ndarray:
        """Ascending real spectrum of a weighted-self-adjoint square operator."""
        if self.kind in ("d", "dstar"):
            raise TypeError("eigenvalues need a square operator")
        S = self.symmetrized()
        return np.linalg.eigvalsh(0.5 * (S + S.T))


def _check_k(m: WeightFunction, k: int, lo: int, hi: int, what: str) -> None:
    if not lo <= k <= hi:
        raise DimensionError(f"{what} needs {lo} <= k <= {hi}, got k={k}")


def _cached(m: WeightFunction, key, build):
    cache = m._cache.setdefault("operators", {})
    if key not in cache:
        cache[key] = build()
    return cache[key]


def assemble_upper_walk(m: WeightFunction, k: int) -> OperatorMatrix:
    """M+_k: stay with probability 1/(k+2), else move through a (k+1)-coface."""
    X = m.complex
    _check_k(m, k, 0, X.n - 1, "upper walk")

    def build():
        idx = X._index[k + 1]
        wk, wk1 = m.of(k), m.of(k + 1)
        rows, cols, vals = [], [], []
        for sigma, w in zip(X.faces(k + 1), wk1):
            subs = [idx[s] for s in combinations(sigma, k + 1)]
            for a in subs:
                for b in subs:
                    if a != b:
                        rows.append(a)
                        cols.append(b)
                        vals.append(w / ((k + 2) * wk[a]))
        N = X.size(k)
        rows.extend(range(N))
        cols.extend(range(N))
        vals.extend([1.0 / (k + 2)] * N)
        M = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
        return OperatorMatrix("upper", k, m, M)

    return _cached(m, ("upper", k), build)


def assemble_lower_walk(m: WeightFunction, k: int) -> OperatorMatrix:
    """M-_k: move through a shared (k-1)-face (lazy part on the diagonal)."""
    X = m.complex
    _check_k(m, k, 0, X.n, "lower walk")

    def build():
        wk, wkm = m.of(k), m.of(k - 1)
        N = X.size(k)
        rows, cols, vals = [], [], []
        # cofaces of each (k-1)-face, from the incidence of d_{k-1}
        inc = X.incidence(k - 1).tocsc()
        diag = np.zeros(N)
        for e in range(X.size(k - 1)):
            cof = inc.indices[inc.indptr[e] : inc.indptr[e + 1]]
            denom = (k + 1) * wkm[e]
            diag[cof] += wk[cof] / denom
            for a in cof:
                for b in cof:
                    if a != b:
                        rows.append(a)
                        cols.append(b)
                        vals.append(wk[b] / denom)
        rows.extend(range(N))
        cols.extend(range(N))
        vals.extend(diag)
        M = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
        return OperatorMatrix("lower", k, m, M)

    return _cached(m, ("lower", k), build)


def assemble_nonlazy_upper(m: WeightFunction, k: int) -> OperatorMatrix:
    """(M')+_k = ((k+2) M+_k - I)/(k+1): zero diagonal, rows m(tau∪tau')/((k+1) m(tau))."""
    X = m.complex
    _check_k(m, k, 0, X.n - 1, "non-lazy upper walk")

    def build():
        U = assemble_upper_walk(m, k).matrix.tocoo()
        off = U.row != U.col
        # (k+2)/(k+1) * w/((k+2) m) == w/((k+1) m); rescale the off-diagonal only
        vals = U.data[off] * ((k + 2) / (k + 1))
        M = sp.csr_matrix((vals, (U.row[off], U.col[off])), shape=U.shape)
        return OperatorMatrix("nonlazy", k, m, M)

    return _cached(m, ("nonlazy", k), build)


def assemble_upper_laplacian(m: WeightFunction, k: int) -> OperatorMatrix:
    """I - (M')+_k, exposed as a derived matrix only."""

    def build():
        M = assemble_nonlazy_upper(m, k).matrix
        L = sp.identity(M.shape[0], format="csr") - M
        return OperatorMatrix("laplacian", k, m, L.tocsr())

    return _cached(m, ("laplacian", k), build)


def assemble_differential(m: WeightFunction, k: int) -> OperatorMatrix:
    """d_k phi(sigma) = sum of phi over the k-faces of sigma."""
    X = m.complex
    _check_k(m, k, -1, X.n - 1, "differential")
    return _cached(m, ("d", k), lambda: OperatorMatrix("d", k, m, X.incidence(k).copy()))


def assemble_codifferential(m: WeightFunction, k: int) -> OperatorMatrix:
    """d*_k psi(tau) = sum over (k+1)-cofaces sigma of m(sigma)/m(tau) psi(sigma)."""
    X = m.complex
    _check_k(m, k, -1, X.n - 1, "codifferential")

    def build():
        inc = X.incidence(k).T.tocsr()
        M = sp.diags(1.0 / m.of(k)) @ inc @ sp.diags(m.of(k + 1))
        return OperatorMatrix("dstar", k, m, sp.csr_matrix(M))

    return _cached(m, ("dstar", k), build)


_ASSEMBLERS = {
    "upper": assemble_upper_walk,
    "lower": assemble_lower_walk,
    "nonlazy": assemble_nonlazy_upper,
    "d": assemble_differential,
    "dstar": assemble_codifferential,
    "laplacian": assemble_upper_laplacian,
}


def operator(m: WeightFunction, kind: str, k: int) -> OperatorMatrix:
    try:
        return _ASSEMBLERS[kind](m, k)
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}") from None


def _frob_rel(A: np.ndarray, B: np.ndarray, ref: np.ndarray) -> float:
    den = np.linalg.norm(ref)
    return float(np.linalg.norm(A - B) / den) if den else float(np.linalg.norm(A - B))


def _sym_res(m: WeightFunction, op: OperatorMatrix) -> float:
    """Relative asymmetry of D M (weighted self-adjointness)."""
    DM = m.of(op.k)[:, None] * op.dense()
    return _frob_rel(DM, DM.T, DM)


class FactorizationReport(NamedTuple):
    k: int
    upper: float | None  # ||d*d - (k+2)M+||_F / ||M+||_F
    lower: float  # ||dd* - (k+1)M-||_F / ||M-||_F
    adjoint: float | None  # ||D_{k+1} d - (D_k d*)^T|| relative
    upper_row_sum: float | None
    lower_row_sum: float
    upper_self_adjoint: float | None
    lower_self_adjoint: float

    def max_residual(self) -> float:
        return max(v for v in self[1:] if v is not None)

    def to_json(self) -> dict:
        return self._asdict()


def verify_factorizations(m: WeightFunction, k: int) -> FactorizationReport:
    """Residuals of d*d = (k+2)M+ and dd* = (k+1)M-, plus stochasticity and symmetry."""
    X = m.complex
    _check_k(m, k, 0, X.n, "factorization check")
    up = adj = up_rows = up_sym = None
    if k <= X.n - 1:
        d = assemble_differential(m, k).dense()
        ds = assemble_codifferential(m, k).dense()
        Mp = assemble_upper_walk(m, k)
        Mpd = Mp.dense()
        up = _frob_rel(ds @ d, (k + 2) * Mpd, Mpd)
        Dd = m.of(k + 1)[:, None] * d
        Dds = m.of(k)[:, None] * ds
        adj = _frob_rel(Dd, Dds.T, Dd)
        up_rows = float(np.max(np.abs(Mpd.sum(axis=1) - 1.0)))
        up_sym = _sym_res(m, Mp)
    d_lo = assemble_differential(m, k - 1).dense()
    ds_lo = assemble_codifferential(m, k - 1).dense()
    Mm = assemble_lower_walk(m, k)
    Mmd = Mm.dense()
    lo = _frob_rel(d_lo @ ds_lo, (k + 1) * Mmd, Mmd)
    lo_rows = float(np.max(np.abs(Mmd.sum(axis=1) - 1.0)))
    return FactorizationReport(k, up, lo, adj, up_rows, lo_rows, up_sym, _sym_res(m, Mm))


class DifferentialBound(NamedTuple):
    lhs: float  # ||M+ phi||^2
    rhs: float  # eps/(k+2) ||phi||^2
    passed: bool
    epsilon: float


def bound_from_differential_norm(phi: Cochain) -> DifferentialBound:
    """With eps = ||d phi||^2/||phi||^2, check ||M+ phi||^2 <= eps/(k+2) ||phi||^2."""
    k = phi.k
    n2 = norm(phi) ** 2
    if n2 == 0.0:
        raise UndefinedRatioError("zero cochain: ||d phi||^2/||phi||^2 undefined")
    dphi = assemble_differential(phi.weights, k)(phi)
    eps = norm(dphi) ** 2 / n2
    lhs = norm(assemble_upper_walk(phi.weights, k)(phi)) ** 2
    rhs = eps / (k + 2) * n2
    return DifferentialBound(lhs, rhs, lhs <= rhs + 1e-10 * n2, eps)


def dump_operator(op: OperatorMatrix, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` (dense, row-major) and ``<prefix>.legend.csv``.

    The legend maps row index to the row face and column index to the
    column face, vertices separated by spaces.
    """
    prefix = Path(prefix)
    mat_path = prefix.with_name(prefix.name + ".csv")
    leg_path = prefix.with_name(prefix.name + ".legend.csv")
    np.savetxt(mat_path, op.dense(), delimiter=",", fmt="%.17g")
    X = op.weights.complex
    with open(leg_path, "w") as fh:
        fh.write("axis,index,vertices\n")
        for axis, dim in (("row", op.target_dim), ("col", op.source_dim)):
            for i, f in enumerate(X.faces(dim)):
                fh.write(f"{axis},{i},{' '.join(map(str, f))}\n")
    return mat_path, leg_path
