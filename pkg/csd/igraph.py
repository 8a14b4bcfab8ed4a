# csd/igraph.py
"""
Interference graphs: CUE-DUE and DUE-DUE neighbor relations, their decomposition
into per-CUE (shared) and per-pair (dedicated) subgraphs, and maximal cliques.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from csd.radio import NoiseModel, PowerProfile, db_to_linear, shared_selection_sinr
from csd.scenario import Scenario

logger = logging.getLogger(__name__)

Clique = Tuple[int, ...]


@dataclass(frozen=True)
class NeighborRelations:
    cue_neighbor: np.ndarray   # C x D bool, True -> pair may NOT reuse the CUE's RBs
    due_adjacency: np.ndarray  # D x D bool, symmetric, False diagonal

    @property
    def num_cues(self) -> int:
        return int(self.cue_neighbor.shape[0])

    @property
    def num_pairs(self) -> int:
        return int(self.due_adjacency.shape[0])

    def validate(self) -> "NeighborRelations":
        adj = self.due_adjacency
        if adj.shape != (self.num_pairs, self.num_pairs):
            raise ValueError(f"due_adjacency must be square, got {adj.shape}")
        if self.cue_neighbor.shape[1] != self.num_pairs:
            raise ValueError(
                f"cue_neighbor has {self.cue_neighbor.shape[1]} pair columns, adjacency has {self.num_pairs}"
            )
        if not np.array_equal(adj, adj.T):
            raise ValueError("due_adjacency must be symmetric")
        if np.any(np.diag(adj)):
            raise ValueError("due_adjacency must have a False diagonal")
        return self


@dataclass(frozen=True)
class Subgraph:
    owner: int                 # CUE id (shared) or pair id (dedicated)
    vertices: Tuple[int, ...]  # pair ids, ascending
    adjacency: np.ndarray      # induced, indexed by position in vertices

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class SubgraphSet:
    shared: List[Subgraph]     # one per CUE
    dedicated: List[Subgraph]  # one per pair


@dataclass(frozen=True)
class CliqueSet:
    shared: List[List[Clique]]
    dedicated: List[List[Clique]]

    @property
    def nmc_shared(self) -> List[int]:
        return [len(c) for c in self.shared]

    @property
    def nmc_dedicated(self) -> List[int]:
        return [len(c) for c in self.dedicated]


# -----------------------------------------------------------------------------
# Neighbor relations
# -----------------------------------------------------------------------------
def cue_neighbors(scenario: Scenario, powers: PowerProfile, noise: NoiseModel, gamma_min_db: float) -> np.ndarray:
    """(c, j) True when pair j reusing CUE c's RBs alone would sit below gamma_min."""
    sinr = shared_selection_sinr(scenario, powers, noise)
    return sinr < db_to_linear(gamma_min_db)


def due_neighbors(scenario: Scenario, powers: PowerProfile, noise: NoiseModel, tau_n_db: float) -> np.ndarray:
    """
    (i, j) True when DUE-T i is received at DUE-R j above NI_Rj / tau_N, measured at the
    dedicated-region power. Symmetrized by OR; diagonal False.
    """
    rss = scenario.gain_txi_rxj * powers.p_due_dedicated
    threshold = noise.ni_rx[None, :] / db_to_linear(tau_n_db)
    adj = rss > threshold
    adj = adj | adj.T
    np.fill_diagonal(adj, False)
    return adj


def build_relations(
    scenario: Scenario,
    powers: PowerProfile,
    noise: NoiseModel,
    gamma_min_db: float,
    tau_n_db: float,
) -> NeighborRelations:
    rel = NeighborRelations(
        cue_neighbor=cue_neighbors(scenario, powers, noise, gamma_min_db),
        due_adjacency=due_neighbors(scenario, powers, noise, tau_n_db),
    )
    logger.debug(
        f"[relations] cue-neighbor entries={int(rel.cue_neighbor.sum())} "
        f"due edges={int(rel.due_adjacency.sum()) // 2}"
    )
    return rel


# -----------------------------------------------------------------------------
# Subgraph decomposition
# -----------------------------------------------------------------------------
def _induced(adj: np.ndarray, vertices: Sequence[int]) -> np.ndarray:
    idx = np.asarray(vertices, dtype=int)
    return adj[np.ix_(idx, idx)].copy()


def build_subgraphs(
    relations: NeighborRelations,
    shared_pairs: Optional[np.ndarray] = None,
    dedicated_pairs: Optional[np.ndarray] = None,
) -> SubgraphSet:
    """
    shared[z]: pairs that are not neighbors of CUE z.
    dedicated[z]: z plus every pair not adjacent to z.
    The optional boolean masks restrict which pairs take part in each region;
    a pair outside the dedicated mask gets an empty dedicated subgraph.
    """
    C, D = relations.num_cues, relations.num_pairs
    adj = relations.due_adjacency
    in_shared = np.ones(D, dtype=bool) if shared_pairs is None else np.asarray(shared_pairs, dtype=bool)
    in_dedicated = np.ones(D, dtype=bool) if dedicated_pairs is None else np.asarray(dedicated_pairs, dtype=bool)

    shared: List[Subgraph] = []
    for z in range(C):
        verts = tuple(int(j) for j in np.flatnonzero(~relations.cue_neighbor[z] & in_shared))
        shared.append(Subgraph(owner=z, vertices=verts, adjacency=_induced(adj, verts)))

    dedicated: List[Subgraph] = []
    for z in range(D):
        if not in_dedicated[z]:
            dedicated.append(Subgraph(owner=z, vertices=(), adjacency=np.zeros((0, 0), dtype=bool)))
            continue
        members = ~adj[z] & in_dedicated
        members[z] = True
        verts = tuple(int(j) for j in np.flatnonzero(members))
        dedicated.append(Subgraph(owner=z, vertices=verts, adjacency=_induced(adj, verts)))

    return SubgraphSet(shared=shared, dedicated=dedicated)


# -----------------------------------------------------------------------------
# Bron-Kerbosch with pivoting over integer bitsets
# -----------------------------------------------------------------------------
def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_cliques(vertices: Sequence[int], adjacency: np.ndarray) -> List[Clique]:
    """
    All maximal cliques of the graph on `vertices` (adjacency indexed by position).
    Output: each clique ascending, list sorted lexicographically.
    """
    n = len(vertices)
    if n == 0:
        return []
    adj = np.asarray(adjacency, dtype=bool)
    nbr = [0] * n
    for a in range(n):
        row = 0
        for b in np.flatnonzero(adj[a]):
            if b != a:
                row |= 1 << int(b)
        nbr[a] = row

    found: List[int] = []
    stack = [(0, (1 << n) - 1, 0)]  # (R, P, X)
    while stack:
        r, p, x = stack.pop()
        if not p:
            if not x:
                found.append(r)
            continue
        # pivot: vertex of P|X with most neighbors in P
        pivot = max(_bits(p | x), key=lambda u: (nbr[u] & p).bit_count())
        for v in _bits(p & ~nbr[pivot]):
            bit = 1 << v
            stack.append((r | bit, p & nbr[v], x & nbr[v]))
            p &= ~bit
            x |= bit

    cliques = [tuple(sorted(int(vertices[i]) for i in _bits(r))) for r in found]
    cliques.sort()
    return cliques


def enumerate_cliques(subgraphs: SubgraphSet) -> CliqueSet:
    return CliqueSet(
        shared=[maximal_cliques(g.vertices, g.adjacency) for g in subgraphs.shared],
        dedicated=[maximal_cliques(g.vertices, g.adjacency) for g in subgraphs.dedicated],
    )
