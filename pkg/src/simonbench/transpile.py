"""Placement and SWAP routing onto device coupling maps."""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

from .circuit import SWAP, Circuit, GateOp, TWO_QUBIT
from .errors import RoutingError, TopologyError

UNREACHABLE = -1


@dataclass(frozen=True)
class CouplingMap:
    num_qubits: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise TopologyError(f"coupling map needs at least one qubit, got {self.num_qubits}")
        seen: set[tuple[int, int]] = set()
        norm = []
        for i, (a, b) in enumerate(self.edges):
            a, b = int(a), int(b)
            if a == b:
                raise TopologyError(f"edges[{i}]: self-loop on qubit {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise TopologyError(f"edges[{i}]: ({a}, {b}) outside [0, {self.num_qubits})")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise TopologyError(f"edges[{i}]: duplicate edge ({a}, {b})")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_qubits)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(n)) for n in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edge_set

    def degree(self, q: int) -> int:
        return len(self.neighbors[q])

    @property
    def is_complete(self) -> bool:
        k = self.num_qubits
        return len(self.edges) == k * (k - 1) // 2

    def is_connected(self) -> bool:
        return all(d != UNREACHABLE for d in self.distances_from(0))

    def distances_from(self, source: int) -> tuple[int, ...]:
        return self._all_distances[source]

    @cached_property
    def _all_distances(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_bfs(self, s)[0] for s in range(self.num_qubits))

    def to_json(self) -> dict[str, Any]:
        return {"num_qubits": self.num_qubits, "edges": [list(e) for e in self.edges]}


def _bfs(cmap: CouplingMap, source: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    dist = [UNREACHABLE] * cmap.num_qubits
    parent = [-1] * cmap.num_qubits
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in cmap.neighbors[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return tuple(dist), tuple(parent)


def _check_qubit(cmap: CouplingMap, q: int) -> None:
    if not 0 <= q < cmap.num_qubits:
        raise TopologyError(f"qubit {q} outside map of {cmap.num_qubits} qubits")


def load_coupling_map(doc: Mapping[str, Any] | str | Path) -> CouplingMap:
    """Build a map from ``{"num_qubits": int, "edges": [[a, b], ...]}``.

    ``doc`` may be the parsed object, a path to a JSON file, or a preset name
    (``eagle127``, ``all_to_all:K``).
    """
    name = ""
    if isinstance(doc, (str, Path)):
        text = str(doc)
        if text in HEAVY_HEX_PRESETS or text.startswith("all_to_all"):
            return preset_map(text)
        path = Path(doc)
        name = path.stem
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise TopologyError(f"coupling map file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise TopologyError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, Mapping):
        raise TopologyError("coupling map document must be a JSON object")
    size = doc.get("num_qubits", doc.get("n"))
    if not isinstance(size, int) or isinstance(size, bool):
        raise TopologyError("num_qubits: expected an integer")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise TopologyError("edges: expected a list of [a, b] pairs")
    for i, e in enumerate(edges):
        if not (isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(v, int) for v in e)):
            raise TopologyError(f"edges[{i}]: expected a pair of integers, got {e!r}")
    return CouplingMap(size, tuple(tuple(e) for e in edges), name=str(doc.get("name", name)))


def all_to_all(k: int) -> CouplingMap:
    if k < 1:
        raise TopologyError(f"all_to_all needs k >= 1, got {k}")
    edges = tuple((a, b) for a in range(k) for b in range(a + 1, k))
    return CouplingMap(k, edges, name=f"all_to_all:{k}")


def line_map(k: int) -> CouplingMap:
    return CouplingMap(k, tuple((i, i + 1) for i in range(k - 1)), name=f"line:{k}")


def _eagle_edges() -> tuple[int, list[tuple[int, int]]]:
    # 7 rows on a 15-column grid; rows 0 and 6 are one column short.  Between
    # consecutive rows sit 4 bridge qubits, each linking the same column above
    # and below.  Numbering runs row, bridges, row, ... as on the device.
    row_cols = [range(0, 14)] + [range(0, 15)] * 5 + [range(1, 15)]
    bridge_cols = [(0, 4, 8, 12), (2, 6, 10, 14)]
    edges: list[tuple[int, int]] = []
    rows: list[dict[int, int]] = []
    bridges: list[list[tuple[int, int]]] = []
    nxt = 0
    for r, cols in enumerate(row_cols):
        row = {}
        for c in cols:
            row[c] = nxt
            if c - 1 in row:
                edges.append((row[c - 1], nxt))
            nxt += 1
        rows.append(row)
        if r < len(row_cols) - 1:
            bridges.append([])
            for c in bridge_cols[r % 2]:
                bridges[r].append((nxt, c))
                nxt += 1
    for r, bs in enumerate(bridges):
        for b, c in bs:
            edges.append((rows[r][c], b))
            edges.append((b, rows[r + 1][c]))
    return nxt, edges


HEAVY_HEX_PRESETS = ("eagle127",)


def heavy_hex_map(preset: str = "eagle127") -> CouplingMap:
    """127-qubit heavy-hex lattice of the Eagle chip family."""
    if preset != "eagle127":
        raise TopologyError(f"unknown heavy-hex preset {preset!r}; known: {', '.join(HEAVY_HEX_PRESETS)}")
    size, edges = _eagle_edges()
    return CouplingMap(size, tuple(edges), name="eagle127")


def preset_map(name: str) -> CouplingMap:
    if name in HEAVY_HEX_PRESETS:
        return heavy_hex_map(name)
    if name.startswith("all_to_all:"):
        try:
            return all_to_all(int(name.split(":", 1)[1]))
        except ValueError:
            pass
    raise TopologyError(f"unknown coupling map preset {name!r}")


def shortest_path_distance(cmap: CouplingMap, a: int, b: int) -> int:
    """Hop count between ``a`` and ``b``; ``UNREACHABLE`` (-1) if disconnected."""
    _check_qubit(cmap, a)
    _check_qubit(cmap, b)
    return cmap.distances_from(a)[b]


def shortest_path(cmap: CouplingMap, a: int, b: int) -> list[int] | None:
    """One shortest path ``a .. b``; BFS expands lower-index neighbours first."""
    _check_qubit(cmap, a)
    _check_qubit(cmap, b)
    dist, parent = _bfs(cmap, a)
    if dist[b] == UNREACHABLE:
        return None
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return path[::-1]


@dataclass(frozen=True)
class Layout:
    """``physical[i]`` is the physical qubit holding logical line ``i``."""

    physical: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "physical", tuple(int(p) for p in self.physical))
        if len(set(self.physical)) != len(self.physical):
            raise TopologyError(f"layout is not injective: {self.physical}")
        if any(p < 0 for p in self.physical):
            raise TopologyError(f"negative physical index in {self.physical}")

    def __getitem__(self, logical: int) -> int:
        return self.physical[logical]

    def __len__(self) -> int:
        return len(self.physical)

    def check_against(self, cmap: CouplingMap, width: int) -> None:
        if len(self.physical) != width:
            raise TopologyError(f"layout covers {len(self.physical)} lines, circuit has {width}")
        for p in self.physical:
            _check_qubit(cmap, p)


def _interactions(circuit: Circuit) -> dict[tuple[int, int], int]:
    weights: dict[tuple[int, int], int] = {}
    for op in circuit.ops:
        if op.kind in TWO_QUBIT:
            a, b = op.qubits
            key = (min(a, b), max(a, b))
            weights[key] = weights.get(key, 0) + 1
    return weights


def adjacent_pair_count(circuit: Circuit, cmap: CouplingMap, layout: Layout) -> int:
    """Number of distinct interacting logical pairs that land on an edge."""
    return sum(1 for a, b in _interactions(circuit) if cmap.adjacent(layout[a], layout[b]))


def place(circuit: Circuit, cmap: CouplingMap, strategy: str = "greedy", seed: int = 0) -> Layout:
    """Choose initial physical qubits for each logical line.

    ``trivial`` is the identity.  ``greedy`` grows the layout outward from a
    highest-degree physical qubit, putting each next logical line where most
    of its already-placed partners are adjacent.  The seed only breaks ties
    between equally good starting qubits.
    """
    width = circuit.width
    if width > cmap.num_qubits:
        raise TopologyError(f"circuit needs {width} qubits, map has {cmap.num_qubits}")
    if strategy == "trivial" or (strategy == "greedy" and cmap.is_complete):
        return Layout(tuple(range(width)))
    if strategy != "greedy":
        raise TopologyError(f"unknown placement strategy {strategy!r}")

    weights = _interactions(circuit)
    partners: list[dict[int, int]] = [{} for _ in range(width)]
    for (a, b), w in weights.items():
        partners[a][b] = w
        partners[b][a] = w
    strength = [sum(p.values()) for p in partners]

    rng = random.Random(seed)
    max_deg = max(cmap.degree(q) for q in range(cmap.num_qubits))
    hubs = [q for q in range(cmap.num_qubits) if cmap.degree(q) == max_deg]
    start = rng.choice(hubs)

    l2p: dict[int, int] = {}
    free = set(range(cmap.num_qubits))

    def next_logical() -> int:
        pending = [l for l in range(width) if l not in l2p]
        return max(pending, key=lambda l: (sum(w for m, w in partners[l].items() if m in l2p), strength[l], -l))

    def score(l: int, p: int) -> tuple:
        dist = cmap.distances_from(p)
        placed = [(l2p[m], w) for m, w in partners[l].items() if m in l2p]
        adjacent = sum(w for q, w in placed if dist[q] == 1)
        spread = sum(w * _finite(dist[q]) for q, w in placed)
        nearest = min((_finite(dist[q]) for q in l2p.values()), default=0)
        # spare free neighbours keep room for partners placed later
        room = sum(1 for v in cmap.neighbors[p] if v in free)
        return (adjacent, -spread, -nearest, room, -p)

    first = next_logical()
    l2p[first] = start
    free.discard(start)
    while len(l2p) < width:
        l = next_logical()
        p = max(free, key=lambda q: score(l, q))
        l2p[l] = p
        free.discard(p)
    return Layout(tuple(l2p[l] for l in range(width)))


def _finite(d: int) -> int:
    return 10**6 if d == UNREACHABLE else d


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    inserted_swap_count: int
    logical: Circuit
    coupling_map: CouplingMap | None = field(default=None, compare=False, repr=False)


def route(circuit: Circuit, cmap: CouplingMap, layout: Layout | None = None) -> RoutedCircuit:
    """Insert SWAPs so every two-qubit gate acts on a coupling-map edge.

    Gates are handled in program order with no lookahead: a gate on
    non-adjacent qubits first walks its first qubit along a shortest path
    until it neighbours the second (``d - 1`` SWAPs).
    """
    if layout is None:
        layout = place(circuit, cmap, "trivial")
    layout.check_against(cmap, circuit.width)
    l2p = list(layout.physical)
    p2l = {p: l for l, p in enumerate(l2p)}
    out: list[GateOp] = []
    swaps = 0
    for op in circuit.ops:
        if op.kind in TWO_QUBIT:
            a, b = (l2p[q] for q in op.qubits)
            if not cmap.adjacent(a, b):
                path = shortest_path(cmap, a, b)
                if path is None:
                    raise RoutingError(f"{op}: physical qubits {a} and {b} are not connected")
                for u, v in zip(path[:-2], path[1:-1]):
                    out.append(SWAP(u, v, inserted=True))
                    swaps += 1
                    lu, lv = p2l.pop(u, None), p2l.pop(v, None)
                    if lu is not None:
                        l2p[lu] = v
                        p2l[v] = lu
                    if lv is not None:
                        l2p[lv] = u
                        p2l[u] = lv
            out.append(GateOp(op.kind, tuple(l2p[q] for q in op.qubits), inserted=op.inserted))
        elif op.kind == "MEASURE":
            out.append(GateOp("MEASURE", (l2p[op.qubits[0]],), op.classical_target))
        else:
            out.append(GateOp(op.kind, (l2p[op.qubits[0]],)))
    physical = Circuit(cmap.num_qubits, tuple(out), circuit.register_split, circuit.num_clbits)
    return RoutedCircuit(physical, layout, Layout(tuple(l2p)), swaps, circuit, cmap)


@dataclass(frozen=True)
class Validation:
    ok: bool
    op_index: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_routed(routed: RoutedCircuit | Circuit, cmap: CouplingMap) -> Validation:
    circuit = routed.circuit if isinstance(routed, RoutedCircuit) else routed
    for i, op in enumerate(circuit.ops):
        if any(q >= cmap.num_qubits for q in op.qubits):
            return Validation(False, i, f"{op} uses a qubit outside the map")
        if op.kind in TWO_QUBIT and not cmap.adjacent(*op.qubits):
            return Validation(False, i, f"{op} acts on non-adjacent qubits")
    return Validation(True)


def layout_report(routed: RoutedCircuit, cmap: CouplingMap | None = None) -> dict[str, Any]:
    """Active/idle physical qubits and each qubit's two-qubit partners.

    Active means allocated by the layout or touched by any op; idle means
    allocated but carrying no op at all.
    """
    touched: set[int] = set()
    partners: dict[int, set[int]] = {}
    for op in routed.circuit.ops:
        touched.update(op.qubits)
        if op.kind in TWO_QUBIT:
            a, b = op.qubits
            partners.setdefault(a, set()).add(b)
            partners.setdefault(b, set()).add(a)
    allocated = set(routed.initial_layout.physical)
    active = sorted(allocated | touched)
    return {
        "active": active,
        "idle": sorted(allocated - touched),
        "partners": {str(q): sorted(partners.get(q, ())) for q in active},
        "inserted_swaps": routed.inserted_swap_count,
        "initial_layout": list(routed.initial_layout.physical),
        "final_layout": list(routed.final_layout.physical),
    }
