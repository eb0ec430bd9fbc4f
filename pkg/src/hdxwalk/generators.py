"""Seeded constructors for test complexes.

Every generator returns (X, m_h, meta) where ``meta`` records the kind,
parameters, seed and the identifier of the random source, so a complex
can be regenerated or matched against a shipped fixture.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .complex import SimplicialComplex, WeightFunction, homogeneous_weight
from .errors import DomainError, GenerationError
from .mixing import FaceSet, local_thinness

__all__ = [
    "GeneratorSpec",
    "RNG_ID",
    "GRAPH_RNG_ID",
    "complete_complex",
    "random_pure_complex",
    "regular_graph_matching",
    "generate",
    "links_connected",
]

RNG_ID = f"numpy.random.Generator(PCG64)/numpy-{np.__version__}"
GRAPH_RNG_ID = f"networkx.random_regular_graph(random.Random/MT19937)/networkx-{nx.__version__}"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # complete | random-pure | regular-graph-matching
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        p = self.params
        if self.kind in ("complete", "random-pure"):
            if p.get("m", 0) < p.get("n", 0) + 1:
                raise DomainError(f"need m >= n+1, got m={p.get('m')}, n={p.get('n')}")
            if p.get("n", 0) < 1:
                raise DomainError("need n >= 1")
        if self.kind == "random-pure" and not 0 < p.get("p", 1.0) <= 1:
            raise DomainError(f"keep-probability must be in (0, 1], got {p.get('p')}")
        if self.kind == "regular-graph-matching":
            v, s = p.get("v", 0), p.get("s", 0)
            if s < 3 or (v * s) % 2 or s >= v:
                raise DomainError(f"need s >= 3, s < v and v*s even, got v={v}, s={s}")
        if self.kind not in ("complete", "random-pure", "regular-graph-matching"):
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_json(self) -> dict:
        return asdict(self)


def complete_complex(m: int, n: int) -> tuple[SimplicialComplex, WeightFunction, dict]:
    """All (n+1)-subsets of {0..m-1} with the homogeneous weight."""
    GeneratorSpec("complete", {"m": m, "n": n})
    X = SimplicialComplex.from_top_faces(combinations(range(m), n + 1))
    meta = {"kind": "complete", "params": {"m": m, "n": n}, "seed": None, "rng_id": None}
    return X, homogeneous_weight(X), meta


def _component_count(verts: list[int], edges: list[tuple[int, int]]) -> int:
    if not verts:
        return 0
    pos = {v: i for i, v in enumerate(verts)}
    rows = [pos[a] for a, b in edges] + [pos[b] for a, b in edges]
    cols = [pos[b] for a, b in edges] + [pos[a] for a, b in edges]
    A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(verts), len(verts)))
    return connected_components(A, directed=False)[0]


def links_connected(X: SimplicialComplex) -> bool:
    """True if the 1-skeleton of every link of dimension >= 1 (X included) is connected."""
    for k in range(-1, X.n - 1):
        for tau in X.faces(k):
            ts = set(tau)
            tops = X.tops_containing(tau)
            verts, edges = set(), set()
            for t in tops:
                rest = [v for v in t if v not in ts]
                verts.update(rest)
                edges.update(combinations(rest, 2))
            if _component_count(sorted(verts), sorted(edges)) != 1:
                return False
    return True


def _admissible(X: SimplicialComplex) -> bool:
    if X.n < 1:
        return False
    inc = X.incidence(X.n - 1)
    if np.any(np.asarray(inc.sum(axis=0)).ravel() < 2):
        return False
    return links_connected(X)


def random_pure_complex(
    m: int, n: int, p: float, seed: int, max_attempts: int = 200
) -> tuple[SimplicialComplex, WeightFunction, dict]:
    """Keep each n-simplex on m vertices with probability p, rejecting bad draws.

    A draw is accepted when every (n-1)-face has at least two top cofaces
    and all links of dimension >= 1 are connected. Attempts consume one
    PCG64 stream, so the result depends only on (m, n, p, seed).
    """
    GeneratorSpec("random-pure", {"m": m, "n": n, "p": p}, seed)
    rng = np.random.default_rng(seed)
    candidates = list(combinations(range(m), n + 1))
    for attempt in range(1, max_attempts + 1):
        keep = rng.random(len(candidates)) < p
        tops = [c for c, kp in zip(candidates, keep) if kp]
        if not tops:
            continue
        X = SimplicialComplex.from_top_faces(tops)
        if _admissible(X):
            meta = {
                "kind": "random-pure",
                "params": {"m": m, "n": n, "p": p},
                "seed": seed,
                "rng_id": RNG_ID,
                "attempts": attempt,
            }
            return X, homogeneous_weight(X), meta
    raise GenerationError(
        f"no admissible complex for m={m}, n={n}, p={p}, seed={seed} in {max_attempts} attempts"
    )


def _greedy_matching(edges) -> list[tuple[int, int]]:
    used: set[int] = set()
    out = []
    for a, b in edges:
        if a not in used and b not in used:
            out.append((a, b))
            used.update((a, b))
    return out


def regular_graph_matching(
    v: int, s: int, seed: int, dim: int = 2, max_attempts: int = 20
) -> tuple[SimplicialComplex, WeightFunction, FaceSet, dict]:
    """An s-regular graph on v vertices, a complex built from it, and a maximal matching.

    ``dim=1`` returns the graph itself as a pure 1-complex. ``dim=2`` keeps
    the triangles of the graph as top faces (edges in no triangle are
    dropped). The matching is greedy in canonical edge order over the
    surviving edges.
    """
    GeneratorSpec("regular-graph-matching", {"v": v, "s": s}, seed)
    if dim not in (1, 2):
        raise DomainError("dim must be 1 or 2")
    for attempt in range(max_attempts):
        G = nx.random_regular_graph(s, v, seed=seed + attempt)
        edges = sorted(tuple(sorted(e)) for e in G.edges())
        if dim == 1:
            tops = edges
        else:
            nbrs = {u: set(G[u]) for u in G}
            tops = sorted(
                (a, b, c) for a, b in edges for c in nbrs[a] & nbrs[b] if c > b
            )
        if not tops:
            continue
        X = SimplicialComplex.from_top_faces(tops)
        m = homogeneous_weight(X)
        A = FaceSet(m, 1, tuple(_greedy_matching(X.faces(1))))
        surviving_deg = np.asarray(X.incidence(0).sum(axis=0)).ravel()
        meta = {
            "kind": "regular-graph-matching",
            "params": {"v": v, "s": s, "dim": dim},
            "seed": seed,
            "rng_id": GRAPH_RNG_ID,
            "attempts": attempt + 1,
            "edges_kept": X.size(1),
            "edges_total": len(edges),
            "min_degree": int(surviving_deg.min()),
            "max_degree": int(surviving_deg.max()),
            "thinness": local_thinness(A),
        }
        return X, m, A, meta
    raise GenerationError(f"no triangles in {max_attempts} regular graphs (v={v}, s={s})")


def generate(spec: GeneratorSpec):
    """Dispatch a :class:`GeneratorSpec` to its constructor."""
    p = spec.params
    if spec.kind == "complete":
        return complete_complex(p["m"], p["n"])
    if spec.kind == "random-pure":
        return random_pure_complex(p["m"], p["n"], p["p"], spec.seed)
    return regular_graph_matching(p["v"], p["s"], spec.seed, dim=p.get("dim", 2))
