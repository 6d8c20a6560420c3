"""Undirected connectivity graphs and the standard scenario shapes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    node_count: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.node_count < 1:
            raise TopologyError("topology needs at least one node")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise TopologyError(f"edge {u}-{v} references an unknown node")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Topology":
        return cls(node_count, frozenset(edges))

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    @cached_property
    def _adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in self.nodes]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def one_hop(self, i: int) -> frozenset[int]:
        return self._adjacency[i]

    @cached_property
    def _two_hop(self) -> tuple[frozenset[int], ...]:
        out = []
        for i in self.nodes:
            dist = self.distances_from(i, limit=2)
            out.append(frozenset(j for j, d in dist.items() if d == 2))
        return tuple(out)

    def two_hop(self, i: int) -> frozenset[int]:
        """Nodes at graph distance exactly two from ``i``."""
        return self._two_hop[i]

    def within_two_hops(self, i: int) -> frozenset[int]:
        """``i`` together with everything it can interfere with."""
        return self.one_hop(i) | self.two_hop(i) | {i}

    def distances_from(self, src: int, limit: int | None = None) -> dict[int, int]:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in self._adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def induced(self, keep: Iterable[int]) -> "Topology":
        """Subgraph on ``keep`` with the original ids; absent nodes become isolated."""
        keep = set(keep)
        return Topology(self.node_count, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))

    def to_edge_list(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in sorted(self.edges))


def load_edge_list(text: str) -> Topology:
    """Parse ``u v`` lines; ``#`` starts a comment, blank lines are ignored.

    Node ids must be dense: every id in ``0..max`` has to appear in some edge.
    """
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TopologyError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise TopologyError(f"line {lineno}: node ids must be integers, got {raw.strip()!r}") from None
        if u < 0 or v < 0:
            raise TopologyError(f"line {lineno}: negative node id")
        if u == v:
            raise TopologyError(f"line {lineno}: self-loop on node {u}")
        edges.add((min(u, v), max(u, v)))
    if not edges:
        raise TopologyError("edge list contains no edges")
    n = 1 + max(max(e) for e in edges)
    seen = {x for e in edges for x in e}
    missing = sorted(set(range(n)) - seen)
    if missing:
        raise TopologyError(f"node ids must be dense 0..{n - 1}; missing {missing}")
    return Topology(n, frozenset(edges))


def _need(n: int, what: str = "N") -> None:
    if n < 1:
        raise TopologyError(f"{what} must be >= 1, got {n}")


def gen_chain(n: int) -> Topology:
    _need(n)
    return Topology(n, frozenset((i, i + 1) for i in range(n - 1)))


def gen_ring(n: int) -> Topology:
    _need(n)
    if n < 3:
        return gen_chain(n)
    return Topology(n, frozenset((i, (i + 1) % n) for i in range(n)))


def gen_star(n: int) -> Topology:
    _need(n)
    return Topology(n, frozenset((0, i) for i in range(1, n)))


def gen_complete(n: int) -> Topology:
    _need(n)
    return Topology(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def gen_grid(rows: int, cols: int) -> Topology:
    _need(rows, "rows")
    _need(cols, "cols")
    edges = set()
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.add((i, i + 1))
            if r + 1 < rows:
                edges.add((i, i + cols))
    return Topology(rows * cols, frozenset(edges))


# chain 2 - 0 - 1 - 3, so nodes 2 and 3 are three hops apart.
SHARED_SLOT_CHAIN_EDGES = "0 1\n0 2\n1 3\n"


def parse_topology_spec(spec: str) -> Topology:
    """``chain:N``, ``ring:N``, ``star:N``, ``complete:N``, ``grid:RxC`` or ``file:PATH``."""
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise TopologyError(f"bad topology spec {spec!r}")
    if kind == "file":
        try:
            with open(arg) as fh:
                return load_edge_list(fh.read())
        except OSError as exc:
            raise TopologyError(f"cannot read topology file {arg!r}: {exc}") from exc
    if kind == "grid":
        try:
            rows, cols = (int(x) for x in arg.lower().split("x"))
        except ValueError:
            raise TopologyError(f"grid spec must be RxC, got {arg!r}") from None
        return gen_grid(rows, cols)
    gens = {"chain": gen_chain, "ring": gen_ring, "star": gen_star, "complete": gen_complete}
    if kind not in gens:
        raise TopologyError(f"unknown topology kind {kind!r}")
    try:
        n = int(arg)
    except ValueError:
        raise TopologyError(f"node count must be an integer, got {arg!r}") from None
    return gens[kind](n)
