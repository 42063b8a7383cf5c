"""In-memory directed attributed graph with O(1) edge updates.

Nodes are dense integers 0..n-1 carrying a binary group label
(minority/majority). Adjacency is kept in both directions as indexed sets
so that membership tests, insertion, removal and uniform random choice
are all O(1) expected time; the removal step of the simulation samples
random out-links every round, which is what forces the indexed-set idiom.
"""

from __future__ import annotations

import enum
import os
from typing import Iterator

import numpy as np
from scipy import sparse


class GroupLabel(enum.IntEnum):
    MAJORITY = 0
    MINORITY = 1


class IndexedSet:
    """Set of ints supporting O(1) add/discard/contains and uniform random choice."""

    __slots__ = ("_items", "_pos")

    def __init__(self, items=()):
        self._items: list[int] = []
        self._pos: dict[int, int] = {}
        for x in items:
            self.add(x)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x) -> bool:
        return x in self._pos

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)

    def add(self, x: int) -> bool:
        if x in self._pos:
            return False
        self._pos[x] = len(self._items)
        self._items.append(x)
        return True

    def discard(self, x: int) -> bool:
        pos = self._pos.pop(x, None)
        if pos is None:
            return False
        last = self._items.pop()
        if pos < len(self._items):
            self._items[pos] = last
            self._pos[last] = pos
        return True

    def choice(self, rng: np.random.Generator) -> int:
        if not self._items:
            raise IndexError("choice from an empty IndexedSet")
        return self._items[int(rng.integers(len(self._items)))]

    def as_array(self) -> np.ndarray:
        return np.asarray(self._items, dtype=np.int64)

    def copy(self) -> "IndexedSet":
        new = IndexedSet.__new__(IndexedSet)
        new._items = list(self._items)
        new._pos = dict(self._pos)
        return new


class DirectedGraph:
    """Directed unweighted graph with fixed node count and binary group labels.

    Minority assignment is deterministic: nodes 0..round(n*fm)-1 are
    minority. Labels are exchangeable before edges exist, so fixing them
    by id keeps group sizes exact without losing generality.
    """

    def __init__(self, n: int, minority_fraction: float = 0.0):
        if n < 1:
            raise ValueError("node count must be >= 1, got %r" % n)
        if not 0.0 <= minority_fraction <= 1.0:
            raise ValueError("minority fraction must be in [0,1], got %r" % minority_fraction)
        self.n = int(n)
        self.minority_fraction = float(minority_fraction)
        self.is_minority = np.zeros(self.n, dtype=bool)
        self.is_minority[: int(round(self.n * self.minority_fraction))] = True
        self._out = [IndexedSet() for _ in range(self.n)]
        self._in = [IndexedSet() for _ in range(self.n)]
        self._edges = IndexedSet()  # edge (i,j) encoded as i*n + j

    # -- labels ------------------------------------------------------------

    def label(self, i: int) -> GroupLabel:
        return GroupLabel.MINORITY if self.is_minority[i] else GroupLabel.MAJORITY

    def group_counts(self) -> tuple[int, int]:
        """(minority count, majority count); always sums to n."""
        n_min = int(self.is_minority.sum())
        return n_min, self.n - n_min

    # -- edges -------------------------------------------------------------

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError("node id %r out of range [0, %d)" % (i, self.n))

    def add_edge(self, i: int, j: int) -> bool:
        """Insert edge (i, j). Returns True iff newly inserted."""
        self._check_node(i)
        self._check_node(j)
        if i == j:
            raise ValueError("self-loops are not allowed (node %d)" % i)
        if not self._edges.add(i * self.n + j):
            return False
        self._out[i].add(j)
        self._in[j].add(i)
        return True

    def remove_edge(self, i: int, j: int) -> bool:
        """Remove edge (i, j). Returns True iff it existed."""
        self._check_node(i)
        self._check_node(j)
        if not self._edges.discard(i * self.n + j):
            return False
        self._out[i].discard(j)
        self._in[j].discard(i)
        return True

    def has_edge(self, i: int, j: int) -> bool:
        return (i * self.n + j) in self._edges

    def random_edge(self, rng: np.random.Generator) -> tuple[int, int]:
        code = self._edges.choice(rng)
        return code // self.n, code % self.n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def out_neighbors(self, i: int) -> IndexedSet:
        return self._out[i]

    def in_neighbors(self, i: int) -> IndexedSet:
        return self._in[i]

    def out_degree(self, i: int) -> int:
        return len(self._out[i])

    def in_degree(self, i: int) -> int:
        return len(self._in[i])

    def in_degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self._in], dtype=np.int64)

    def out_degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self._out], dtype=np.int64)

    def edges(self) -> Iterator[tuple[int, int]]:
        n = self.n
        for code in self._edges:
            yield code // n, code % n

    def edge_array(self) -> np.ndarray:
        """(e, 2) array of edges, sorted by (source, target)."""
        codes = np.sort(self._edges.as_array())
        return np.column_stack((codes // self.n, codes % self.n))

    def adjacency(self) -> sparse.csr_array:
        """Adjacency as a CSR array with unit weights."""
        if self.num_edges == 0:
            return sparse.csr_array((self.n, self.n), dtype=np.float64)
        ea = self.edge_array()
        data = np.ones(len(ea), dtype=np.float64)
        return sparse.csr_array((data, (ea[:, 0], ea[:, 1])), shape=(self.n, self.n))

    def copy(self) -> "DirectedGraph":
        new = DirectedGraph.__new__(DirectedGraph)
        new.n = self.n
        new.minority_fraction = self.minority_fraction
        new.is_minority = self.is_minority.copy()
        new._out = [s.copy() for s in self._out]
        new._in = [s.copy() for s in self._in]
        new._edges = self._edges.copy()
        return new

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.is_minority, other.is_minority)
            and set(self._edges) == set(other._edges)
        )

    # -- serialization -----------------------------------------------------

    def write_edgelist(self, path: str | os.PathLike, labels_path: str | os.PathLike | None = None) -> None:
        """Write `# n=<int> fm=<float>` header then one `source target` per line.

        If the label assignment does not follow the deterministic id rule,
        a labels sidecar (one 0/1 per line) is written and referenced.
        """
        n_min = int(self.is_minority.sum())
        canonical = np.zeros(self.n, dtype=bool)
        canonical[:n_min] = True
        needs_sidecar = not np.array_equal(self.is_minority, canonical)
        with open(path, "w") as fh:
            fh.write("# n=%d fm=%s\n" % (self.n, repr(self.minority_fraction)))
            if needs_sidecar:
                if labels_path is None:
                    labels_path = str(path) + ".labels"
                fh.write("# labels=%s\n" % os.path.basename(str(labels_path)))
                with open(labels_path, "w") as lf:
                    lf.write("\n".join("1" if m else "0" for m in self.is_minority) + "\n")
            for i, j in self.edge_array():
                fh.write("%d %d\n" % (i, j))

    @classmethod
    def read_edgelist(cls, path: str | os.PathLike) -> "DirectedGraph":
        n = None
        fm = 0.0
        labels_file = None
        edges = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for field in line[1:].split():
                        key, _, value = field.partition("=")
                        if key == "n":
                            n = int(value)
                        elif key == "fm":
                            fm = float(value)
                        elif key == "labels":
                            labels_file = value
                    continue
                i, j = line.split()
                edges.append((int(i), int(j)))
        if n is None:
            raise ValueError("missing '# n=<int> ...' header in %s" % path)
        g = cls(n, fm)
        if labels_file is not None:
            sidecar = os.path.join(os.path.dirname(os.path.abspath(str(path))), labels_file)
            labels = np.loadtxt(sidecar, dtype=int)
            g.is_minority = np.asarray(labels, dtype=bool).reshape(n)
        for i, j in edges:
            g.add_edge(i, j)
        return g
