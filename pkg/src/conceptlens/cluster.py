"""Agglomerative Ward clustering over embedding rows.

Two independent implementations of the same contract:

``ward_cluster``
    Production path. Repeatedly finds all reciprocal-nearest-neighbor
    cluster pairs and merges them, keeping only per-cluster centroids
    and sizes (Ward cost between clusters is an exact function of
    those). Ward linkage is reducible, so every mutual-NN merge belongs
    to the unique stepwise dendrogram; no n^2 distance matrix is ever
    materialized and memory stays O(n*d). Neighbor scans run as blocked
    float64 matrix products so large inputs are compute-bound.

``ward_cluster_oracle``
    Verification path. Direct cubic algorithm on a full pairwise cost
    matrix updated with the Lance-Williams recursion, rescanning the
    whole matrix for the global minimum at every step. Intended for
    n up to a few hundred.

Cost convention: merging clusters A and B records the increase in total
within-cluster sum of squared deviations,
    |A||B| / (|A|+|B|) * ||mean(A) - mean(B)||^2,
so two singletons merge at half their squared Euclidean distance.

All distance arithmetic is float64 regardless of input dtype. Ties are
broken by the lexicographically smallest (left, right) node-id pair.
Inputs are centered (mean row subtracted) before any distance work;
Ward is translation invariant and centering keeps the norm/dot-product
expansion well conditioned for embeddings far from the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidK, NumericError, ShapeError
from .records import Concept

# Element budget per blocked scan temporary (~96 MB of float64).
_BLOCK_ELEMS = 12_000_000

MergeRow = Tuple[int, int, float, int]  # (left, right, cost, new_size)


@dataclass
class Dendrogram:
    """Full binary merge tree. Leaves are 0..n_leaves-1; the t-th merge
    (in the stored, cost-sorted order) creates node n_leaves + t."""

    merges: List[MergeRow]
    n_leaves: int

    def validate(self) -> None:
        n = self.n_leaves
        assert len(self.merges) == max(0, n - 1), "merge count must be n_leaves - 1"
        seen_child = set()
        prev_cost = -np.inf
        for t, (left, right, cost, size) in enumerate(self.merges):
            assert left < right, "merge children must be ordered"
            for child in (left, right):
                assert 0 <= child < n + t, "merge references a node that does not exist yet"
                assert child not in seen_child, "node participates in two merges"
                seen_child.add(child)
            assert cost >= prev_cost, "merge costs must be non-decreasing"
            prev_cost = cost


def dendrogram_to_tsv(dendrogram: Dendrogram) -> bytes:
    lines = [f"# n_leaves={dendrogram.n_leaves}"]
    for left, right, cost, size in dendrogram.merges:
        lines.append(f"{left}\t{right}\t{cost!r}\t{size}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def dendrogram_from_tsv(data: bytes) -> Dendrogram:
    lines = data.decode("utf-8").splitlines()
    if not lines or not lines[0].startswith("# n_leaves="):
        raise ShapeError("malformed dendrogram export")
    n_leaves = int(lines[0].split("=", 1)[1])
    merges: List[MergeRow] = []
    for line in lines[1:]:
        left, right, cost, size = line.split("\t")
        merges.append((int(left), int(right), float(cost), int(size)))
    return Dendrogram(merges=merges, n_leaves=n_leaves)


# ---------------------------------------------------------------------------
# shared plumbing


def _as_matrix(matrix: np.ndarray) -> np.ndarray:
    x = np.asarray(matrix)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ShapeError("input must be a non-empty 2-d matrix", shape=tuple(x.shape))
    x = x.astype(np.float64, copy=True)
    if not np.isfinite(x).all():
        raise NumericError("input matrix contains NaN or Inf")
    x -= x.mean(axis=0)
    return x


def _check_k(k: int, n: int) -> None:
    if not isinstance(k, (int, np.integer)) or not (1 <= int(k) <= n):
        raise InvalidK("cluster count must satisfy 1 <= k <= n", k=k, n=n)


def _canonical_merges(n: int, discovered: List[MergeRow]) -> List[MergeRow]:
    """Stable-sort discovery order by cost and renumber internal nodes.

    Costs are clamped to be >= each child's creation cost before this is
    called, and a child merge is always discovered before its parent, so
    the stable sort never places a parent before its children.
    """
    order = sorted(range(len(discovered)), key=lambda t: (discovered[t][2], t))
    remap = {}
    out: List[MergeRow] = []
    for new_t, t in enumerate(order):
        left, right, cost, size = discovered[t]
        left = remap.get(left, left)
        right = remap.get(right, right)
        if left > right:
            left, right = right, left
        remap[n + t] = n + new_t
        out.append((left, right, cost, size))
    return out


def cut_dendrogram(dendrogram: Dendrogram, k: int) -> List[List[int]]:
    """Partition after undoing the k-1 most expensive (latest) merges.

    Returns blocks of leaf indices, each sorted ascending, blocks ordered
    by their smallest leaf.
    """
    n = dendrogram.n_leaves
    _check_k(k, n)
    applied = n - int(k)
    parent = list(range(n + applied))
    for t in range(applied):
        left, right, _, _ = dendrogram.merges[t]
        new = n + t
        parent[left] = new
        parent[right] = new
    blocks: dict = {}
    for leaf in range(n):
        node = leaf
        while parent[node] != node:
            node = parent[node]
        # path compression
        cur = leaf
        while parent[cur] != cur:
            parent[cur], cur = node, parent[cur]
        blocks.setdefault(node, []).append(leaf)
    return sorted(blocks.values(), key=lambda b: b[0])


def _concepts_from_blocks(
    matrix: np.ndarray, blocks: List[List[int]], row_ids: np.ndarray
) -> List[Concept]:
    x = np.asarray(matrix, dtype=np.float64)
    keyed = []
    for block in blocks:
        members = sorted(int(row_ids[i]) for i in block)
        centroid = x[block].mean(axis=0)
        keyed.append((-len(members), members[0], members, centroid))
    keyed.sort(key=lambda item: (item[0], item[1]))
    return [
        Concept(concept_id=cid, member_occurrences=members, centroid=centroid, size=len(members))
        for cid, (_, _, members, centroid) in enumerate(keyed)
    ]


def _prepare(matrix: np.ndarray, k: int, row_ids: Optional[Sequence[int]]):
    x = _as_matrix(matrix)
    n = x.shape[0]
    _check_k(k, n)
    if row_ids is None:
        ids = np.arange(n, dtype=np.int64)
    else:
        ids = np.asarray(row_ids, dtype=np.int64)
        if ids.shape != (n,):
            raise ShapeError("row_ids length must match matrix rows", rows=n, ids=len(ids))
    return x, n, ids


# ---------------------------------------------------------------------------
# fast path: reciprocal-nearest-neighbor rounds


def _scan_round(
    cents: np.ndarray,
    sizes: np.ndarray,
    node_ids: np.ndarray,
    scan_pos: np.ndarray,
    nn_id: np.ndarray,
    nn_dist: np.ndarray,
) -> None:
    """Refresh exact nearest neighbors for ``scan_pos`` rows in place and
    opportunistically tighten every cached neighbor from the same blocks."""
    m = cents.shape[0]
    norms = np.einsum("ij,ij->i", cents, cents)
    inv_sizes = 1.0 / sizes
    full_rescan = len(scan_pos) == m
    block = max(1, _BLOCK_ELEMS // m)
    for start in range(0, len(scan_pos), block):
        bpos = scan_pos[start : start + block]
        rows = np.arange(len(bpos))
        # cost = ||c_i - c_j||^2 / (1/s_i + 1/s_j); the harmonic form
        # saves a multiply pass. Cancellation can leave tiny negative
        # values for near-identical centroids; merge costs are clamped
        # later, and argmin is unaffected.
        cost = cents[bpos] @ cents.T
        cost *= -2.0
        cost += norms[bpos, None]
        cost += norms[None, :]
        cost /= inv_sizes[bpos, None] + inv_sizes[None, :]
        cost[rows, bpos] = np.inf
        ridx = cost.argmin(axis=1)
        nn_id[bpos] = node_ids[ridx]
        nn_dist[bpos] = cost[rows, ridx]
        if full_rescan:
            continue
        # Column pass: a freshly scanned cluster may be the new nearest
        # neighbor of a cluster whose cache we are not rescanning. Caches
        # hold the (distance, node id) lexicographic minimum, so equal
        # distances only win with a smaller id.
        cidx = cost.argmin(axis=0)
        cmin = cost[cidx, np.arange(m)]
        cand = node_ids[bpos[cidx]]
        better = (cmin < nn_dist) | ((cmin == nn_dist) & (cand < nn_id))
        if better.any():
            nn_dist[better] = cmin[better]
            nn_id[better] = cand[better]


def _ward_merges_fast(x: np.ndarray) -> List[MergeRow]:
    n = x.shape[0]
    if n == 1:
        return []
    cents = x.copy()
    sizes = np.ones(n, dtype=np.float64)
    node_ids = np.arange(n, dtype=np.int64)
    nn_id = np.full(n, -1, dtype=np.int64)
    nn_dist = np.full(n, np.inf, dtype=np.float64)
    node_cost = np.zeros(2 * n - 1, dtype=np.float64)
    discovered: List[MergeRow] = []
    scan_pos = np.arange(n, dtype=np.int64)

    while cents.shape[0] > 1:
        m = cents.shape[0]
        _scan_round(cents, sizes, node_ids, scan_pos, nn_id, nn_dist)

        # node_ids is ascending, so searchsorted finds each partner's slot.
        ppos = np.searchsorted(node_ids, nn_id)
        mutual = (nn_id[ppos] == node_ids) & (node_ids < nn_id)
        ipos = np.flatnonzero(mutual)
        if len(ipos) > 0:
            jpos = ppos[ipos]
        else:
            # Mutual pairs always exist under exact arithmetic; last-ulp
            # asymmetry in blocked scans could in principle break every
            # cycle, so fall back to the best one-sided pair.
            i = int(np.argmin(nn_dist))
            j = int(ppos[i])
            ipos = np.array([min(i, j)], dtype=np.int64)
            jpos = np.array([max(i, j)], dtype=np.int64)
        order = np.lexsort((node_ids[jpos], node_ids[ipos], nn_dist[ipos]))
        ipos, jpos = ipos[order], jpos[order]

        p = len(ipos)
        left_ids = node_ids[ipos]
        right_ids = node_ids[jpos]
        new_ids = np.arange(n + len(discovered), n + len(discovered) + p, dtype=np.int64)
        costs = np.maximum(
            np.maximum(nn_dist[ipos], node_cost[left_ids]), node_cost[right_ids]
        )
        node_cost[new_ids] = costs
        new_sizes = sizes[ipos] + sizes[jpos]
        new_cents = cents[ipos] * (sizes[ipos] / new_sizes)[:, None]
        new_cents += cents[jpos] * (sizes[jpos] / new_sizes)[:, None]
        for t in range(p):
            discovered.append(
                (int(left_ids[t]), int(right_ids[t]), float(costs[t]), int(new_sizes[t]))
            )

        keep = np.ones(m, dtype=bool)
        keep[ipos] = False
        keep[jpos] = False
        dead = np.concatenate([left_ids, right_ids])
        stale_kept = np.flatnonzero(np.isin(nn_id[keep], dead))

        survivors = m - 2 * p
        cents = np.concatenate([cents[keep], new_cents], axis=0)
        sizes = np.concatenate([sizes[keep], new_sizes])
        node_ids = np.concatenate([node_ids[keep], new_ids])
        nn_id = np.concatenate([nn_id[keep], np.full(p, -1, dtype=np.int64)])
        nn_dist = np.concatenate([nn_dist[keep], np.full(p, np.inf)])
        scan_pos = np.concatenate([stale_kept, np.arange(survivors, survivors + p)])
        nn_dist[scan_pos] = np.inf
        nn_id[scan_pos] = -1

    return discovered


def ward_cluster(
    matrix: np.ndarray, k: int, row_ids: Optional[Sequence[int]] = None
) -> Tuple[Dendrogram, List[Concept]]:
    """Cluster rows under Ward's criterion; cut the dendrogram into k
    concepts (undoing the k-1 most expensive merges).

    Concepts are sorted by size descending, ties by smallest member id,
    and numbered in that order. ``row_ids`` translates row indices into
    occurrence ids (identity when omitted).
    """
    x, n, ids = _prepare(matrix, k, row_ids)
    merges = _canonical_merges(n, _ward_merges_fast(x))
    dendrogram = Dendrogram(merges=merges, n_leaves=n)
    blocks = cut_dendrogram(dendrogram, k)
    return dendrogram, _concepts_from_blocks(matrix, blocks, ids)


# ---------------------------------------------------------------------------
# oracle: cubic global rescan with the Lance-Williams update


def _half_sqdist(x: np.ndarray) -> np.ndarray:
    norms = np.einsum("ij,ij->i", x, x)
    d = x @ x.T
    d *= -2.0
    d += norms[:, None]
    d += norms[None, :]
    np.maximum(d, 0.0, out=d)
    # BLAS gram matrices are not bit-symmetric; the global-min scan
    # relies on exact symmetry.
    d = np.minimum(d, d.T)
    d *= 0.5
    return d


def _ward_merges_oracle(x: np.ndarray) -> List[MergeRow]:
    n = x.shape[0]
    if n == 1:
        return []
    cost = _half_sqdist(x)
    np.fill_diagonal(cost, np.inf)
    alive = np.ones(n, dtype=bool)
    ids = np.arange(n, dtype=np.int64)
    sizes = np.ones(n, dtype=np.float64)
    node_cost = np.zeros(2 * n - 1, dtype=np.float64)
    discovered: List[MergeRow] = []
    for step in range(n - 1):
        best_pair = None  # ((min_id, max_id), slot_a, slot_b)
        live = np.flatnonzero(alive)
        sub = cost[np.ix_(live, live)]
        best = sub.min()
        rows, cols = np.nonzero(sub == best)
        for r, c in zip(rows, cols):
            if r >= c:
                continue
            a, b = live[r], live[c]
            ia, ib = int(ids[a]), int(ids[b])
            pair = (min(ia, ib), max(ia, ib))
            if best_pair is None or pair < best_pair[0]:
                best_pair = (pair, a, b)
        (left, right), a, b = best_pair
        new_node = n + step
        merge_cost = max(float(best), node_cost[left], node_cost[right])
        node_cost[new_node] = merge_cost
        size = sizes[a] + sizes[b]
        discovered.append((left, right, merge_cost, int(size)))
        # Lance-Williams for Ward: rescan every surviving cluster k.
        s_i, s_j, d_ij = sizes[a], sizes[b], cost[a, b]
        for kslot in live:
            if kslot == a or kslot == b:
                continue
            s_k = sizes[kslot]
            d_new = (
                (s_i + s_k) * cost[a, kslot]
                + (s_j + s_k) * cost[b, kslot]
                - s_k * d_ij
            ) / (s_i + s_j + s_k)
            cost[a, kslot] = cost[kslot, a] = d_new
        alive[b] = False
        cost[b, :] = np.inf
        cost[:, b] = np.inf
        ids[a] = new_node
        sizes[a] = size
    return discovered


def ward_cluster_oracle(
    matrix: np.ndarray, k: int, row_ids: Optional[Sequence[int]] = None
) -> Tuple[Dendrogram, List[Concept]]:
    """Same contract as :func:`ward_cluster`, via the direct cubic
    algorithm. Cross-check for small instances only."""
    x, n, ids = _prepare(matrix, k, row_ids)
    merges = _canonical_merges(n, _ward_merges_oracle(x))
    dendrogram = Dendrogram(merges=merges, n_leaves=n)
    blocks = cut_dendrogram(dendrogram, k)
    return dendrogram, _concepts_from_blocks(matrix, blocks, ids)


# ---------------------------------------------------------------------------


def assign_nearest_concept(vector: np.ndarray, concepts: Sequence[Concept]) -> int:
    """Concept with the closest centroid (Euclidean); ties go to the
    smallest concept_id."""
    v = np.asarray(vector, dtype=np.float64).reshape(-1)
    if not concepts:
        raise ShapeError("no concepts to assign against")
    d = concepts[0].centroid.shape[0]
    if v.shape[0] != d:
        raise ShapeError("vector dimensionality mismatch", expected=d, got=int(v.shape[0]))
    if not np.isfinite(v).all():
        raise NumericError("query vector contains NaN or Inf")
    best = None
    for c in concepts:
        dist = float(np.dot(v - c.centroid, v - c.centroid))
        key = (dist, c.concept_id)
        if best is None or key < best:
            best = key
    return best[1]
