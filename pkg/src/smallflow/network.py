"""Graph data model and text formats.

Two instance kinds are handled:

* PathInstance: a directed graph with k source terminals X, k sink
  terminals Y (disjoint), optional positive integer edge costs, and an
  optional total-length bound.  Parallel edges are allowed and keep
  distinct ids; self-loops are rejected.

* FlowInstance: a directed network with a source, a sink, integral
  capacities >= 1, costs >= 1, and a target flow value.

Text formats (line oriented):

* paths instances ('#' starts a comment)::

      q paths <n> <m> <k>
      x <v>            (k lines, source list in order)
      y <v>            (k lines, sink list in order)
      e <u> <v> [cost] (m lines; cost is an optional positive integer)

* extended DIMACS min-cost flow ('c' starts a comment)::

      p min <n> <m>
      n <v> <supply>   (positive supply at the source, -k at the sink)
      a <u> <v> <low> <cap> <cost>   (low must be 0)

Vertices are 1-indexed in files and 0-indexed in memory.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


class ParseError(ValueError):
    """Malformed instance text; message carries the offending line number."""


class PathInstance:
    """Directed graph with terminal lists X, Y and optional edge costs.

    Edge ids are assigned in construction order and are stable under
    re-parsing the same file.  Missing costs default to 1 per edge, which
    makes total cost coincide with total length.
    """

    def __init__(self, vertex_count, edges, sources, sinks, costs=None,
                 length_bound=None):
        n = vertex_count
        if n < 2:
            raise ValueError(f"need at least 2 vertices, got {n}")
        sources = tuple(sources)
        sinks = tuple(sinks)
        k = len(sources)
        if k < 1 or len(sinks) != k:
            raise ValueError(
                f"need equal nonempty terminal lists, got {len(sources)} "
                f"sources and {len(sinks)} sinks"
            )
        terminals = sources + sinks
        if len(set(terminals)) != 2 * k:
            raise ValueError("terminal sets not disjoint")
        for v in terminals:
            if not 0 <= v < n:
                raise ValueError(f"terminal vertex {v} out of range")
        edges = [tuple(e) for e in edges]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        if costs is not None:
            costs = list(costs)
            if len(costs) != len(edges):
                raise ValueError("cost list length != edge count")
            for c in costs:
                if c < 1:
                    raise ValueError(f"cost below 1: {c}")
        if length_bound is not None and length_bound > k * (n - 1):
            raise ValueError(
                f"length bound {length_bound} exceeds k(n-1) = {k * (n - 1)}"
            )
        self.n = n
        self.m = len(edges)
        self.k = k
        self.edges = edges
        self.sources = sources
        self.sinks = sinks
        self.costs = costs
        self.length_bound = length_bound
        self.source_index = {v: i for i, v in enumerate(sources)}
        self.sink_index = {v: i for i, v in enumerate(sinks)}
        self._terminal = set(terminals)
        # adjacency: edge ids grouped by endpoint
        self.out_edges = [[] for _ in range(n)]
        self.in_edges = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(edges):
            self.out_edges[u].append(eid)
            self.in_edges[v].append(eid)

    def is_terminal(self, v) -> bool:
        return v in self._terminal

    def cost(self, eid) -> int:
        return 1 if self.costs is None else self.costs[eid]

    def cost_list(self) -> list[int]:
        return [1] * self.m if self.costs is None else list(self.costs)

    def max_cost(self) -> int:
        return 1 if self.costs is None else max(self.costs, default=1)

    def with_costs(self, costs) -> "PathInstance":
        return PathInstance(self.n, self.edges, self.sources, self.sinks,
                           costs=costs, length_bound=self.length_bound)

    def max_path_edges(self) -> int:
        """Edges usable by k vertex-disjoint simple paths: min(m, k(n-1))."""
        return min(self.m, self.k * (self.n - 1))

    def simple_cost_cap(self, costs=None) -> int:
        """Upper bound on the cost of any set of k disjoint simple paths.

        Sum of the max_path_edges() largest edge costs.  Any nonzero
        exact-cost slice below or at this bound is certified by a simple
        set, so scans never need to go further.
        """
        cs = sorted(self.cost_list() if costs is None else costs,
                    reverse=True)
        return sum(cs[: self.max_path_edges()])

    def __eq__(self, other):
        return (
            isinstance(other, PathInstance)
            and (self.n, self.edges, self.sources, self.sinks, self.costs,
                 self.length_bound)
            == (other.n, other.edges, other.sources, other.sinks,
                other.costs, other.length_bound)
        )

    def __repr__(self):
        return (f"PathInstance(n={self.n}, m={self.m}, k={self.k}, "
                f"costed={self.costs is not None})")


@dataclass
class FlowInstance:
    """Directed network for min-cost flow of a small target value."""

    vertex_count: int
    edges: list  # (u, v, capacity, cost)
    source: int
    sink: int
    target_value: int

    def __post_init__(self):
        n = self.vertex_count
        if not (0 <= self.source < n and 0 <= self.sink < n):
            raise ValueError("source/sink out of range")
        if self.source == self.sink:
            raise ValueError("source equals sink")
        if self.target_value < 1:
            raise ValueError("target flow value must be >= 1")
        self.edges = [tuple(e) for e in self.edges]
        for u, v, cap, cost in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u}, {v}) out of range")
            if cap < 1:
                raise ValueError(f"capacity below 1 on arc ({u}, {v})")
            if cost < 1:
                raise ValueError(f"cost below 1 on arc ({u}, {v})")

    @property
    def n(self):
        return self.vertex_count

    @property
    def m(self):
        return len(self.edges)

    def max_cost(self):
        return max((e[3] for e in self.edges), default=1)


@dataclass(frozen=True)
class Walk:
    """A not-necessarily-simple source-to-sink walk.

    vertices[0] is a source terminal, vertices[-1] a sink terminal, and
    everything between is a non-terminal.  edge_ids[i] connects
    vertices[i] to vertices[i+1]; with parallel edges the id sequence
    distinguishes otherwise identical vertex sequences.
    """

    vertices: tuple
    edge_ids: tuple

    @property
    def length(self):
        return len(self.edge_ids)


@dataclass(frozen=True)
class ProperWalkSet:
    """k walks with distinct starts in X and distinct ends in Y."""

    walks: tuple

    @property
    def total_length(self):
        return sum(w.length for w in self.walks)

    def monomial(self):
        """Edge-id multiset of the whole set, as a sorted tuple."""
        ids = []
        for w in self.walks:
            ids.extend(w.edge_ids)
        return tuple(sorted(ids))


def validate_walk_set(instance: PathInstance, walk_set: ProperWalkSet) -> bool:
    """Check every proper-walk-set invariant against the instance."""
    walks = walk_set.walks
    if len(walks) != instance.k:
        return False
    starts = [w.vertices[0] for w in walks]
    ends = [w.vertices[-1] for w in walks]
    if sorted(starts) != sorted(instance.sources):
        return False
    if sorted(ends) != sorted(instance.sinks):
        return False
    total = 0
    for w in walks:
        vs, es = w.vertices, w.edge_ids
        if len(vs) != len(es) + 1 or len(es) < 1:
            return False
        for v in vs[1:-1]:
            if instance.is_terminal(v):
                return False
        for i, eid in enumerate(es):
            if not 0 <= eid < instance.m:
                return False
            if instance.edges[eid] != (vs[i], vs[i + 1]):
                return False
        total += len(es)
    return total <= instance.k * (instance.n - 1)


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

def _tokens(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        yield lineno, line.split()


def parse_paths_instance(text: str) -> PathInstance:
    header = None
    sources, sinks, edges, costs = [], [], [], []
    any_cost = False
    for lineno, toks in _tokens(text):
        tag = toks[0]
        if tag.startswith("#"):
            continue
        try:
            if tag == "q":
                if header is not None:
                    raise ParseError(f"line {lineno}: duplicate header")
                if len(toks) != 5 or toks[1] != "paths":
                    raise ParseError(
                        f"line {lineno}: expected 'q paths <n> <m> <k>'")
                header = tuple(int(t) for t in toks[2:])
            elif tag == "x":
                sources.append(int(toks[1]) - 1)
            elif tag == "y":
                sinks.append(int(toks[1]) - 1)
            elif tag == "e":
                if len(toks) not in (3, 4):
                    raise ParseError(
                        f"line {lineno}: expected 'e <u> <v> [cost]'")
                edges.append((int(toks[1]) - 1, int(toks[2]) - 1))
                if len(toks) == 4:
                    costs.append(int(toks[3]))
                    any_cost = True
                else:
                    costs.append(1)
            else:
                raise ParseError(f"line {lineno}: unknown record '{tag}'")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: malformed line") from exc
    if header is None:
        raise ParseError("missing 'q paths' header line")
    n, m, k = header
    if len(sources) != k or len(sinks) != k:
        raise ParseError(
            f"terminal count mismatch: header k={k}, got {len(sources)} "
            f"sources and {len(sinks)} sinks"
        )
    if len(edges) != m:
        raise ParseError(f"edge count mismatch: header m={m}, got {len(edges)}")
    try:
        return PathInstance(n, edges, sources, sinks,
                            costs=costs if any_cost else None)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def serialize_paths_instance(instance: PathInstance) -> str:
    lines = [f"q paths {instance.n} {instance.m} {instance.k}"]
    lines += [f"x {v + 1}" for v in instance.sources]
    lines += [f"y {v + 1}" for v in instance.sinks]
    for eid, (u, v) in enumerate(instance.edges):
        if instance.costs is None:
            lines.append(f"e {u + 1} {v + 1}")
        else:
            lines.append(f"e {u + 1} {v + 1} {instance.costs[eid]}")
    return "\n".join(lines) + "\n"


def parse_dimacs_flow(text: str) -> FlowInstance:
    header = None
    supplies = {}
    arcs = []
    for lineno, toks in _tokens(text):
        tag = toks[0]
        if tag == "c" or tag.startswith("#"):
            continue
        try:
            if tag == "p":
                if header is not None:
                    raise ParseError(f"line {lineno}: duplicate problem line")
                if len(toks) != 4 or toks[1] != "min":
                    raise ParseError(
                        f"line {lineno}: expected 'p min <n> <m>'")
                header = (int(toks[2]), int(toks[3]))
            elif tag == "n":
                v, supply = int(toks[1]) - 1, int(toks[2])
                if v in supplies:
                    raise ParseError(
                        f"line {lineno}: duplicate node descriptor")
                supplies[v] = supply
            elif tag == "a":
                if len(toks) != 6:
                    raise ParseError(
                        f"line {lineno}: expected 'a <u> <v> <low> <cap> <cost>'")
                u, v, low, cap, cost = (int(t) for t in toks[1:])
                if low != 0:
                    raise ParseError(
                        f"line {lineno}: nonzero lower bound unsupported")
                if cap < 1:
                    raise ParseError(f"line {lineno}: capacity below 1")
                if cost < 1:
                    raise ParseError(f"line {lineno}: cost below 1")
                arcs.append((u - 1, v - 1, cap, cost))
            else:
                raise ParseError(f"line {lineno}: unknown record '{tag}'")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: malformed line") from exc
    if header is None:
        raise ParseError("missing problem line")
    n, m = header
    if len(arcs) != m:
        raise ParseError(f"arc count mismatch: header m={m}, got {len(arcs)}")
    pos = [(v, s) for v, s in supplies.items() if s > 0]
    neg = [(v, s) for v, s in supplies.items() if s < 0]
    if len(pos) != 1 or len(neg) != 1:
        raise ParseError("need exactly one source and one sink node line")
    (s, k), (t, nk) = pos[0], neg[0]
    if k != -nk:
        raise ParseError(f"supply {k} at source does not match demand {-nk}")
    try:
        return FlowInstance(n, arcs, s, t, k)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def serialize_dimacs_flow(instance: FlowInstance) -> str:
    lines = [f"p min {instance.n} {instance.m}"]
    lines.append(f"n {instance.source + 1} {instance.target_value}")
    lines.append(f"n {instance.sink + 1} {-instance.target_value}")
    for u, v, cap, cost in instance.edges:
        lines.append(f"a {u + 1} {v + 1} 0 {cap} {cost}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Seeded instance generators (test batteries and bench mode)
# ---------------------------------------------------------------------------

def random_paths_instance(rng: random.Random, n: int, k: int,
                          extra_edges: int, cost_max: int | None = None,
                          plant: bool = True) -> PathInstance:
    """Random instance with optional planted disjoint paths for feasibility.

    With plant=True, k vertex-disjoint X->Y paths through a random split of
    the non-terminals are laid down first, then extra_edges random edges
    are sprinkled on top (parallel edges allowed, self-loops not).
    """
    if n < 2 * k:
        raise ValueError("need n >= 2k")
    vertices = list(range(n))
    rng.shuffle(vertices)
    sources = vertices[:k]
    sinks = vertices[k:2 * k]
    middle = vertices[2 * k:]
    edges = []
    if plant:
        rng.shuffle(middle)
        cut = sorted(rng.choices(range(len(middle) + 1), k=k - 1))
        pieces = []
        prev = 0
        for c in cut + [len(middle)]:
            pieces.append(middle[prev:c])
            prev = c
        for i in range(k):
            chain = [sources[i]] + pieces[i][: rng.randint(0, len(pieces[i]))] \
                + [sinks[i]]
            for a, b in zip(chain, chain[1:]):
                edges.append((a, b))
    for _ in range(extra_edges):
        while True:
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v:
                edges.append((u, v))
                break
    costs = None
    if cost_max is not None:
        costs = [rng.randint(1, cost_max) for _ in edges]
    return PathInstance(n, edges, sources, sinks, costs=costs)


def random_flow_instance(rng: random.Random, n: int, m: int, k: int,
                         cap_max: int, cost_max: int,
                         plant: bool = True) -> FlowInstance:
    """Random flow network; plant=True routes some capacity source-to-sink."""
    if n < 2:
        raise ValueError("need n >= 2")
    s, t = rng.sample(range(n), 2)
    arcs = []
    if plant and n > 2:
        routed = 0
        while routed < k and len(arcs) < m:
            mid = rng.choice([v for v in range(n) if v not in (s, t)])
            cap = rng.randint(1, cap_max)
            cost1 = rng.randint(1, cost_max)
            cost2 = rng.randint(1, cost_max)
            arcs.append((s, mid, cap, cost1))
            arcs.append((mid, t, cap, cost2))
            routed += cap
    while len(arcs) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        arcs.append((u, v, rng.randint(1, cap_max), rng.randint(1, cost_max)))
    return FlowInstance(n, arcs[:m], s, t, k)
