"""Construction of complex realizations from point samples.

The staged construction admits a candidate (j+1)-tuple only when all of its
j-faces were accepted, then accepts it iff its deterministic uniform mark
does not exceed phi_j of the tuple.  Marks are derived by keyed hashing of
the sorted stable vertex identities, so a tuple's mark never changes when
other points are added or removed; coupled complexes built from overlapping
point sets therefore agree exactly on shared tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._mixing import hash_rows, uniform_from_hash
from .connect import ConnectionSystem
from .space import PointSample, as_point_sample

__all__ = [
    "ComplexSample",
    "AugmentedSample",
    "build_complex",
    "build_augmented",
    "derive_mark",
    "ADDED_INDEX_BASE",
]

# index offset giving augmentation points identities disjoint from samples
ADDED_INDEX_BASE = 1 << 32

# KD-tree pruning only pays off beyond this point count
_TREE_THRESHOLD = 96


def derive_mark(key: int, vertex_ids) -> float:
    """Deterministic uniform in [0, 1) attached to a simplex candidate.

    ``vertex_ids`` are the stable point identities of the tuple; the input
    order is irrelevant (a canonical sort is applied).
    """
    ids = np.sort(np.asarray(vertex_ids, dtype=np.uint64))
    return float(uniform_from_hash(hash_rows(key, ids[None, :]))[0])


def _derive_marks(key: int, ids: np.ndarray) -> np.ndarray:
    return uniform_from_hash(hash_rows(key, np.sort(ids, axis=1)))


def _pack_rows(rows: np.ndarray, n: int) -> np.ndarray | None:
    """Injective uint64 encoding of index rows when the bit budget allows."""
    t = rows.shape[1]
    bits = max(int(n).bit_length(), 1)
    if t * bits > 63:
        return None
    base = np.uint64(max(n, 1))
    key = rows[:, 0].astype(np.uint64)
    for c in range(1, t):
        key = key * base + rows[:, c].astype(np.uint64)
    return key


def _lexsort_rows(rows: np.ndarray, n: int | None = None) -> np.ndarray:
    if len(rows) <= 1:
        return rows
    if n is not None:
        key = _pack_rows(rows, n)
        if key is not None:
            return rows[np.argsort(key, kind="stable")]
    order = np.lexsort(tuple(rows[:, c] for c in range(rows.shape[1] - 1, -1, -1)))
    return rows[order]


class _RowSet:
    """Membership queries on a fixed set of integer rows.

    Uses an exact packed-integer encoding when the rows fit in 64 bits, a
    hash encoding with full-row verification otherwise, and a lexicographic
    void-dtype fallback in the (astronomically unlikely) event of a hash
    collision inside the stored set.
    """

    def __init__(self, rows: np.ndarray, n: int):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        self._n = n
        self._rows = None
        self._keys_void = None
        key = _pack_rows(rows, n)
        if key is not None:
            self._mode = "packed"
            self._keys = np.sort(key)
            return
        key = hash_rows(0, rows.astype(np.uint64))
        order = np.argsort(key, kind="stable")
        if np.any(np.diff(key[order]) == np.uint64(0)):
            self._mode = "void"
            dtype = np.dtype([("", np.int64)] * rows.shape[1])
            self._keys_void = np.sort(rows.view(dtype).ravel())
            return
        self._mode = "hashed"
        self._keys = key[order]
        self._rows = rows[order]

    def contains(self, rows: np.ndarray) -> np.ndarray:
        if len(rows) == 0:
            return np.zeros(0, dtype=bool)
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        if self._mode == "void":
            if len(self._keys_void) == 0:
                return np.zeros(len(rows), dtype=bool)
            probe = rows.view(self._keys_void.dtype).ravel()
            pos = np.minimum(np.searchsorted(self._keys_void, probe), len(self._keys_void) - 1)
            return self._keys_void[pos] == probe
        if len(self._keys) == 0:
            return np.zeros(len(rows), dtype=bool)
        if self._mode == "packed":
            probe = _pack_rows(rows, self._n)
        else:
            probe = hash_rows(0, rows.astype(np.uint64))
        pos = np.minimum(np.searchsorted(self._keys, probe), len(self._keys) - 1)
        hit = self._keys[pos] == probe
        if self._mode == "hashed" and np.any(hit):
            idx = np.flatnonzero(hit)
            hit[idx] = np.all(self._rows[pos[idx]] == rows[idx], axis=1)
        return hit


@dataclass
class ComplexSample:
    """One realization: the point sample plus index tuples per dimension.

    ``simplices[j]`` is an (f_j, j+1) array of strictly increasing vertex
    index rows in lexicographic order; ``mark_key`` is the seed material of
    the keyed mark scheme.
    """

    points: PointSample
    simplices: list[np.ndarray]
    mark_key: int

    @property
    def alpha(self) -> int:
        return len(self.simplices) - 1

    def f_counts(self) -> np.ndarray:
        """The f-vector (f_0, ..., f_alpha)."""
        return np.array([len(s) for s in self.simplices], dtype=np.int64)

    def simplex_tuples(self, j: int) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.simplices[j]]

    def dump(self) -> str:
        """Line-oriented text format: dimension then vertex indices."""
        lines = []
        for j, rows in enumerate(self.simplices):
            for row in rows:
                lines.append(" ".join([str(j)] + [str(int(v)) for v in row]))
        return "\n".join(lines) + ("\n" if lines else "")


def _candidate_pairs(points: PointSample, system: ConnectionSystem) -> np.ndarray:
    n = len(points)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    if (
        system.max_range is not None
        and points.chart == "euclidean"
        and n > _TREE_THRESHOLD
    ):
        from scipy.spatial import cKDTree

        pairs = cKDTree(points.locations).query_pairs(
            system.max_range * (1.0 + 1e-12), output_type="ndarray"
        )
        if len(pairs) == 0:
            return np.empty((0, 2), dtype=np.int64)
        pairs = np.sort(pairs.astype(np.int64), axis=1)
        return _lexsort_rows(pairs, n)
    iu = np.triu_indices(n, k=1)
    return np.column_stack([iu[0], iu[1]]).astype(np.int64)


def _accept(points: PointSample, system: ConnectionSystem, key: int, cand: np.ndarray, j: int) -> np.ndarray:
    """Filter candidate rows by phi_j and the keyed marks."""
    if len(cand) == 0:
        return np.empty((0, j + 1), dtype=np.int64)
    marks = None if points.marks is None else points.marks[cand]
    phi = system.evaluate(j, points.locations[cand], marks)
    keep = phi >= 1.0
    undecided = (phi > 0.0) & ~keep
    if np.any(undecided):
        rows = cand[undecided]
        u = _derive_marks(key, points.idents[rows])
        sel = np.zeros(len(cand), dtype=bool)
        sel[np.flatnonzero(undecided)[u <= phi[undecided]]] = True
        keep = keep | sel
    return cand[keep]


def _forward_adjacency(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays mapping each vertex to its sorted higher-index neighbors."""
    counts = np.bincount(edges[:, 0], minlength=n)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    # edges are lexsorted, so grouping by first column keeps neighbors sorted
    return offsets.astype(np.int64), edges[:, 1].copy()


def _expand_by_last(prev: np.ndarray, offsets: np.ndarray, nbrs: np.ndarray) -> np.ndarray:
    """Extend each simplex row by every forward neighbor of its last vertex."""
    last = prev[:, -1]
    counts = offsets[last + 1] - offsets[last]
    total = int(counts.sum())
    if total == 0:
        return np.empty((0, prev.shape[1] + 1), dtype=np.int64)
    rep = np.repeat(np.arange(len(prev)), counts)
    cum = np.concatenate(([0], np.cumsum(counts)))
    within = np.arange(total) - np.repeat(cum[:-1], counts)
    w = nbrs[np.repeat(offsets[last], counts) + within]
    return np.column_stack([prev[rep], w])


def build_complex(points, system: ConnectionSystem, key: int) -> ComplexSample:
    """Build one realization from a point sample and a connection system.

    Deterministic given (points, key): candidates of dimension j extend
    accepted (j-1)-simplices by common forward neighbors and are accepted
    iff derive_mark(key, ids) <= phi_j.
    """
    ps = as_point_sample(points)
    n = len(ps)
    if len(np.unique(ps.order_keys)) != n:
        raise ValueError("points must have pairwise distinct order keys")
    key = int(key) & ((1 << 64) - 1)

    simplices: list[np.ndarray] = [np.arange(n, dtype=np.int64).reshape(-1, 1)]
    edges = _accept(ps, system, key, _candidate_pairs(ps, system), 1)
    simplices.append(edges)

    if system.alpha >= 2 and len(edges):
        offsets, nbrs = _forward_adjacency(edges, n)
        prev = edges
        for j in range(2, system.alpha + 1):
            if len(prev) == 0:
                simplices.append(np.empty((0, j + 1), dtype=np.int64))
                prev = simplices[-1]
                continue
            cand = _expand_by_last(prev, offsets, nbrs)
            if len(cand):
                prev_set = _RowSet(prev, n)
                ok = np.ones(len(cand), dtype=bool)
                # the face dropping the new vertex is prev itself; check the rest
                for c in range(j):
                    faces = np.delete(cand, c, axis=1)
                    ok &= prev_set.contains(faces)
                    if not ok.any():
                        break
                cand = cand[ok]
            accepted = _accept(ps, system, key, cand, j)
            simplices.append(_lexsort_rows(accepted, n))
            prev = simplices[-1]
    else:
        for j in range(2, system.alpha + 1):
            simplices.append(np.empty((0, j + 1), dtype=np.int64))

    return ComplexSample(ps, simplices, key)


# ---------------------------------------------------------------------------
# augmented builds and coupling


@dataclass
class AugmentedSample:
    """The coupled family built from a sample plus l added points.

    ``full`` is the realization on the union point set with all added
    points present; the complex with retention set I is obtained by
    deleting every simplex meeting a dropped added point, hence all
    retained variants are subcomplexes of ``full``.
    """

    full: ComplexSample
    base_count: int
    added_count: int
    retained: frozenset[int]

    def added_vertex(self, slot: int) -> int:
        return self.base_count + slot

    @cached_property
    def _contains(self) -> list[np.ndarray]:
        """Per dimension, boolean (f_j, l): row j contains added slot s."""
        added = np.arange(self.base_count, self.base_count + self.added_count)
        out = []
        for rows in self.full.simplices:
            if len(rows) == 0:
                out.append(np.zeros((0, self.added_count), dtype=bool))
            else:
                out.append((rows[:, :, None] == added[None, None, :]).any(axis=1))
        return out

    def row_mask(self, j: int, required=(), excluded=()) -> np.ndarray:
        """Rows of dimension j containing all required slots and no excluded one."""
        mask = np.ones(len(self.full.simplices[j]), dtype=bool)
        cont = self._contains[j]
        for s in required:
            mask &= cont[:, s]
        for s in excluded:
            mask &= ~cont[:, s]
        return mask

    def restricted(self, retained=None) -> ComplexSample:
        """The subcomplex for a retention set (default: this sample's)."""
        keep = self.retained if retained is None else frozenset(retained)
        if not keep <= set(range(self.added_count)):
            raise ValueError("retention set must be a subset of the added slots")
        dropped = sorted(set(range(self.added_count)) - keep)
        rows = [
            self.full.simplices[j][self.row_mask(j, excluded=dropped)]
            for j in range(self.full.alpha + 1)
        ]
        return ComplexSample(self.full.points, rows, self.full.mark_key)


def build_augmented(points, added, retained, system: ConnectionSystem, key: int) -> AugmentedSample:
    """Build the coupled complex for base points, added points and a retention set.

    Marks are derived from the union point set, so every retained variant is
    a subcomplex of the full augmented complex, and dropping all added
    points recovers exactly ``build_complex(points, system, key)``.
    """
    base = as_point_sample(points)
    extra = as_point_sample(added, chart=base.chart)
    retained = frozenset(int(i) for i in retained)
    if not retained <= set(range(len(extra))):
        raise ValueError("retention set must be a subset of the added slots")
    union = base.concat(extra)
    full = build_complex(union, system, key)
    return AugmentedSample(full, len(base), len(extra), retained)
