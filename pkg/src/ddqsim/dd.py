"""Hash-consed decision diagrams for quantum state vectors.

A state over ``n`` qubits is stored as a rooted DAG: each node splits on one
qubit (level ``n-1`` at the root, level 0 at the bottom) and carries two
weighted edges for that qubit being 0 ("low") or 1 ("high").  The amplitude
of a basis state is the product of edge weights along the corresponding
root-to-terminal path; a zero-weight edge is a stub that short-circuits the
whole subtree to zero.  Structurally identical nodes are stored once per
:class:`Context` (hash-consing), so equal sub-vectors share memory.

An edge is a plain ``(target, weight)`` tuple; this module sits on every hot
path, so edges stay raw tuples rather than a class.  ``ZERO`` is the unique
zero stub ``(TERMINAL, 0j)``.

Conventions pinned here and relied on by every other module:

* Normalization: the outgoing weights of a node are divided by the magnitude
  of the largest one (ties resolved toward the low edge), and that positive
  real factor is pushed into the incoming edge.  Phases therefore stay local
  to the level where they occur, sub-vectors that agree up to a positive real
  factor share one node, and states built from vectors carry a non-negative
  real root weight.
* Outgoing weights are canonicalized: values within ``EPS`` of an already
  stored weight (component-wise) map to that stored value, so the unique
  table cannot fill up with near-duplicates produced by rounding.  Incoming
  scale factors stay raw; they are re-canonicalized wherever they next feed
  a node.
* Index convention: bitstring ``b_{n-1}...b_0`` (qubit ``n-1`` written first)
  maps to the integer index with ``b_{n-1}`` most significant.

A :class:`Context` owns all tables and is meant for single-threaded use;
independent contexts may run concurrently in separate threads or processes.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

#: Weight canonicalization tolerance (component-wise).
EPS = 1e-13

#: Dense expansion is refused above this qubit count.
DENSE_QUBIT_LIMIT = 20

#: Default number of slots in each bounded operation cache (power of two).
DEFAULT_COMPUTE_TABLE_SIZE = 1 << 20

#: Weight-table entry count above which garbage collection rebuilds the
#: canonicalization tables from live nodes.
WEIGHT_TABLE_LIMIT = 1 << 20

#: Edges are (target, weight) tuples; this alias is for signatures only.
Edge = tuple


class CapacityError(RuntimeError):
    """An operation would exceed a hard size guard."""


class Terminal:
    """Shared sink of every diagram; represents the scalar 1."""

    __slots__ = ()
    level = -1
    uid = 0

    def __repr__(self) -> str:
        return "<terminal>"


TERMINAL = Terminal()

#: The unique zero stub: weight 0, pointing at the terminal.
ZERO = (TERMINAL, 0j)
ONE = (TERMINAL, 1.0 + 0j)


class VNode:
    """Vector-diagram node: one qubit split into low/high sub-vectors."""

    __slots__ = ("level", "low", "high", "uid", "ref")

    def __init__(self, level: int, low: Edge, high: Edge, uid: int):
        self.level = level
        self.low = low
        self.high = high
        self.uid = uid
        self.ref = 0

    def __repr__(self) -> str:
        return f"<q{self.level} #{self.uid}>"


class MNode:
    """Matrix-diagram node: four successors ordered (row bit, column bit)."""

    __slots__ = ("level", "edges", "uid", "ref")

    def __init__(self, level: int, edges: tuple, uid: int):
        self.level = level
        self.edges = edges
        self.uid = uid
        self.ref = 0

    def __repr__(self) -> str:
        return f"<m{self.level} #{self.uid}>"


class BoundedCache:
    """Fixed-size memoization table with overwrite-on-collision.

    Lookups verify the full key, so a collision can only cost a recomputation,
    never a wrong result.
    """

    __slots__ = ("_mask", "_slots")

    def __init__(self, size: int = DEFAULT_COMPUTE_TABLE_SIZE):
        if size < 1 or size & (size - 1):
            raise ValueError(f"cache size must be a power of two, got {size}")
        self._mask = size - 1
        self._slots: list = [None] * size

    def get(self, key):
        entry = self._slots[hash(key) & self._mask]
        if entry is not None and entry[0] == key:
            return entry[1]
        return None

    def put(self, key, value) -> None:
        self._slots[hash(key) & self._mask] = (key, value)

    def clear(self) -> None:
        self._slots = [None] * (self._mask + 1)


class Context:
    """Owner of the unique tables, weight table and operation caches.

    All diagrams created through one context live in its tables; diagrams
    from different contexts must not be combined by operations that create
    nodes.  Nodes are reference counted: every stored parent edge counts one
    reference, and public handles (:class:`StateDD`) pin their root.  Dead
    nodes are reclaimed only by an explicit :meth:`collect_garbage` call, so
    node counts observed between calls are reproducible.

    The compute-table size comes from the ``DDQSIM_COMPUTE_TABLE_SIZE``
    environment variable when not given explicitly.
    """

    def __init__(self, compute_table_size: int | None = None):
        if compute_table_size is None:
            compute_table_size = int(os.environ.get(
                "DDQSIM_COMPUTE_TABLE_SIZE", DEFAULT_COMPUTE_TABLE_SIZE))
        self._weights: dict[complex, complex] = {}
        self._buckets: dict[tuple[int, int], complex] = {}
        self._vtable: dict = {}
        self._mtable: dict = {}
        self._next_uid = 1
        self.apply_cache = BoundedCache(compute_table_size)
        self.add_cache = BoundedCache(compute_table_size)
        self.gate_dds: dict = {}
        for seed in (1 + 0j, -1 + 0j, 1j, -1j):
            self.weight(seed)

    # -- weights ---------------------------------------------------------

    def weight(self, z: complex) -> complex:
        """Return the canonical stored weight for ``z``.

        Values are snapped onto a grid of cell size ``EPS`` per component:
        queries landing in an occupied cell within ``EPS`` of its stored
        value reuse that value, so float dust from normalization collapses
        onto one representative.  Values straddling a cell boundary may
        stay distinct; that costs a missed node merge, never a wrong
        amplitude.
        """
        w = self._weights.get(z)
        if w is not None:
            return w
        re = z.real
        im = z.imag
        if -EPS <= re <= EPS and -EPS <= im <= EPS:
            w = 0j
        else:
            w = self._bucket_lookup(re, im)
        self._weights[z] = w
        return w

    def _bucket_lookup(self, re: float, im: float) -> complex:
        key = (round(re / EPS), round(im / EPS))
        buckets = self._buckets
        cand = buckets.get(key)
        if cand is not None and abs(cand.real - re) <= EPS \
                and abs(cand.imag - im) <= EPS:
            return cand
        w = complex(re, im)
        buckets[key] = w
        return w

    # -- node construction ----------------------------------------------

    def make_vnode(self, level: int, low: Edge, high: Edge) -> Edge:
        """Build (or find) the canonical node over ``low``/``high``.

        Returns the normalized edge into the node: the outgoing weights are
        scaled by 1/max-magnitude (a positive real, returned as the new edge
        weight, raw).  Children whose relative weight falls below ``EPS``
        collapse to the zero stub; if everything vanishes, so does the node.
        """
        wl = low[1]
        wh = high[1]
        ml = abs(wl)
        mh = abs(wh)
        m = ml if ml >= mh else mh
        if m <= EPS:
            return ZERO
        weights = self._weights
        z = wl / m
        nlw = weights.get(z)
        if nlw is None:
            nlw = self.weight(z)
        z = wh / m
        nhw = weights.get(z)
        if nhw is None:
            nhw = self.weight(z)
        lt = TERMINAL if nlw == 0 else low[0]
        ht = TERMINAL if nhw == 0 else high[0]
        key = (level, lt, nlw, ht, nhw)
        node = self._vtable.get(key)
        if node is None:
            nl = ZERO if nlw == 0 else (lt, nlw)
            nh = ZERO if nhw == 0 else (ht, nhw)
            node = VNode(level, nl, nh, self._next_uid)
            self._next_uid += 1
            self._vtable[key] = node
            if lt is not TERMINAL:
                lt.ref += 1
            if ht is not TERMINAL:
                ht.ref += 1
        return (node, m)

    def make_mnode(self, level: int, edges: tuple) -> Edge:
        """Matrix-node analogue of :meth:`make_vnode` (four successors)."""
        m = max(abs(e[1]) for e in edges)
        if m <= EPS:
            return ZERO
        norm_edges = []
        for e in edges:
            w = self.weight(e[1] / m)
            norm_edges.append(ZERO if w == 0 else (e[0], w))
        norm_edges = tuple(norm_edges)
        key = (level, norm_edges)
        node = self._mtable.get(key)
        if node is None:
            node = MNode(level, norm_edges, self._next_uid)
            self._next_uid += 1
            self._mtable[key] = node
        return (node, m)

    # -- reference counting / garbage collection -------------------------

    def incref(self, edge: Edge) -> None:
        if edge[0] is not TERMINAL:
            edge[0].ref += 1

    def decref(self, edge: Edge) -> None:
        if edge[0] is not TERMINAL:
            edge[0].ref -= 1

    def collect_garbage(self) -> int:
        """Drop all vector nodes with zero references; returns the count.

        Operation caches are cleared first so they cannot resurrect entries
        that mention reclaimed nodes.  Matrix nodes (gate diagrams) persist
        for the lifetime of the context; they are few and heavily shared.
        """
        self.apply_cache.clear()
        self.add_cache.clear()
        dead = [n for n in self._vtable.values() if n.ref == 0]
        removed = 0
        vtable = self._vtable
        while dead:
            node = dead.pop()
            nl = node.low
            nh = node.high
            del vtable[(node.level, nl[0], nl[1], nh[0], nh[1])]
            removed += 1
            for child in (nl[0], nh[0]):
                if child is not TERMINAL:
                    child.ref -= 1
                    if child.ref == 0:
                        dead.append(child)
        if len(self._weights) > WEIGHT_TABLE_LIMIT:
            self._rebuild_weight_tables()
        return removed

    def _rebuild_weight_tables(self) -> None:
        """Shrink the weight tables to the values stored in live nodes.

        The exact-value memo and the bucket grid otherwise grow with every
        distinct raw weight ever canonicalized, which on low-redundancy
        circuits means millions of entries.  Weights still stored in nodes
        keep their identity across the rebuild, so snapping stays stable for
        everything alive; dropped values simply re-canonicalize on next use.
        """
        weights: dict[complex, complex] = {}
        buckets: dict[tuple[int, int], complex] = {}
        def keep(w: complex) -> None:
            if w != 0 and w not in weights:
                weights[w] = w
                key = (round(w.real / EPS), round(w.imag / EPS))
                if key not in buckets:
                    buckets[key] = w
        old = self._weights
        for seed in (1 + 0j, -1 + 0j, 1j, -1j):
            keep(old.get(seed, seed))
        for node in self._vtable.values():
            keep(node.low[1])
            keep(node.high[1])
        for mnode in self._mtable.values():
            for _, w in mnode.edges:
                keep(w)
        self._weights = weights
        self._buckets = buckets

    def unique_table_size(self) -> int:
        """Number of vector nodes currently stored (live or not)."""
        return len(self._vtable)

    # -- state construction ----------------------------------------------

    def make_basis_state(self, num_qubits: int, bits: str) -> "StateDD":
        """Chain diagram for the basis state labelled ``bits`` (qubit n-1 first)."""
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        _check_bits(bits, num_qubits)
        edge = ONE
        for level in range(num_qubits):
            if bits[num_qubits - 1 - level] == "0":
                edge = self.make_vnode(level, edge, ZERO)
            else:
                edge = self.make_vnode(level, ZERO, edge)
        return self.new_state(edge, num_qubits)

    def from_dense(self, vector) -> "StateDD":
        """Build the canonical diagram of a unit-norm amplitude vector."""
        v = np.asarray(vector, dtype=complex)
        dim = v.shape[0] if v.ndim == 1 else 0
        if v.ndim != 1 or dim < 2 or dim & (dim - 1):
            raise ValueError("amplitude vector length must be a power of two >= 2")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"amplitude vector must have unit norm, got {norm!r}")
        num_qubits = dim.bit_length() - 1
        root = self._dense_rec(v, num_qubits - 1)
        return self.new_state(root, num_qubits)

    def _dense_rec(self, v: np.ndarray, level: int) -> Edge:
        if level < 0:
            return (TERMINAL, self.weight(complex(v[0])))
        half = v.shape[0] // 2
        low = self._dense_rec(v[:half], level - 1)
        high = self._dense_rec(v[half:], level - 1)
        return self.make_vnode(level, low, high)

    def new_state(self, root: Edge, num_qubits: int) -> "StateDD":
        """Wrap a root edge as a pinned state handle (low-level)."""
        state = StateDD(self, root, num_qubits)
        self.incref(root)
        return state


@dataclass
class StateDD:
    """Handle to a decision diagram representing a ``2**num_qubits`` vector.

    Holding one pins the root against garbage collection; call
    :meth:`release` when a long-running loop is done with an intermediate
    state so :meth:`Context.collect_garbage` can reclaim it.
    """

    context: Context
    root: Edge
    num_qubits: int

    def release(self) -> None:
        self.context.decref(self.root)

    def amplitude(self, bits: str) -> complex:
        """Product of edge weights along the path selected by ``bits``.

        Factors multiply bottom-up, in the same association order as
        :meth:`to_dense`, so both report bit-identical values.
        """
        _check_bits(bits, self.num_qubits)
        node, rw = self.root
        if rw == 0:
            return 0j
        path = []
        for ch in bits:
            node, w = node.low if ch == "0" else node.high
            if w == 0:
                return 0j
            path.append(w)
        acc = 1.0 + 0j
        while path:
            acc = path.pop() * acc
        return complex(rw * acc)

    def to_dense(self) -> np.ndarray:
        """Expand to the full amplitude vector (guarded above 20 qubits)."""
        if self.num_qubits > DENSE_QUBIT_LIMIT:
            raise CapacityError(
                f"refusing dense expansion of {self.num_qubits} qubits "
                f"(limit {DENSE_QUBIT_LIMIT})")
        memo: dict[int, np.ndarray] = {}

        def expand(node) -> np.ndarray:
            if node is TERMINAL:
                return np.ones(1, dtype=complex)
            got = memo.get(id(node))
            if got is None:
                half = 1 << node.level
                parts = []
                for target, w in (node.low, node.high):
                    if w == 0:
                        parts.append(np.zeros(half, dtype=complex))
                    else:
                        parts.append(w * expand(target))
                got = np.concatenate(parts)
                memo[id(node)] = got
            return got

        return self.root[1] * expand(self.root[0])

    def node_count(self) -> int:
        """Number of distinct non-terminal nodes reachable from the root."""
        root, w = self.root
        if w == 0 or root is TERMINAL:
            return 0
        seen = {id(root)}
        stack = [root]
        count = 0
        while stack:
            node = stack.pop()
            count += 1
            for target, ew in (node.low, node.high):
                if ew != 0 and target is not TERMINAL:
                    i = id(target)
                    if i not in seen:
                        seen.add(i)
                        stack.append(target)
        return count

    def norm(self) -> float:
        """Euclidean norm of the represented vector, computed recursively."""
        return squared_norm(self.root) ** 0.5

    def __repr__(self) -> str:
        return f"StateDD(num_qubits={self.num_qubits}, nodes={self.node_count()})"


def _check_bits(bits: str, num_qubits: int) -> None:
    if len(bits) != num_qubits or any(c not in "01" for c in bits):
        raise ValueError(f"expected a bitstring of length {num_qubits}, got {bits!r}")


def reachable_nodes(root: Edge) -> Iterator[VNode]:
    """All non-terminal nodes reachable from ``root``, in DFS preorder."""
    if root[0] is TERMINAL or root[1] == 0:
        return
    seen: set[int] = set()
    stack = [root[0]]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        for e in (node.high, node.low):
            if e[1] != 0 and e[0] is not TERMINAL:
                stack.append(e[0])


def subtree_norms(root: Edge) -> dict[int, float]:
    """Squared norm of every reachable node's own sub-vector, keyed by id.

    The value excludes the incoming edge weight; the terminal's implicit
    value is 1 and is not part of the map.
    """
    norms: dict[int, float] = {}

    def rec(node) -> float:
        if node is TERMINAL:
            return 1.0
        got = norms.get(id(node))
        if got is None:
            got = 0.0
            for target, w in (node.low, node.high):
                if w != 0:
                    got += (w.real * w.real + w.imag * w.imag) * rec(target)
            norms[id(node)] = got
        return got

    if root[1] != 0:
        rec(root[0])
    return norms


def squared_norm(root: Edge) -> float:
    """Squared Euclidean norm of the vector represented by ``root``."""
    w = root[1]
    if w == 0:
        return 0.0
    base = subtree_norms(root)
    sub = 1.0 if root[0] is TERMINAL else base[id(root[0])]
    return (w.real * w.real + w.imag * w.imag) * sub
