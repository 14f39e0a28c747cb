"""Component interaction graph construction and rendering.

Given two or more statecharts, the builder finds the services one chart emits
and another accepts, removes switching states (states that exist only to hand
control to a peer), classifies the remaining states as provided, required or
intermediate interfaces, and connects providing states to requiring states
with service-labeled edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .components import ServiceName, check_identifier
from .errors import NoInteraction, SchemaError
from .statechart import ChartSet, Statechart, extract_interfaces

StateRef = tuple[str, str]  # (component name, state name)


class Kind(Enum):
    """How a state participates in cross-component interaction."""

    PROVIDED = "P"
    REQUIRED = "R"
    INTERMEDIATE = "G"
    REMOVED = "Removed"


_KIND_ORDER = (Kind.PROVIDED, Kind.REQUIRED, Kind.INTERMEDIATE)


def format_kinds(kinds: frozenset[Kind]) -> str:
    """Stable text for a kind set: 'P', 'R', 'P,R', 'G' or 'Removed'."""
    if Kind.REMOVED in kinds:
        return Kind.REMOVED.value
    return ",".join(k.value for k in _KIND_ORDER if k in kinds)


@dataclass(frozen=True)
class ServiceSides:
    """States emitting a service and states accepting it, in chart order."""

    emitters: tuple[StateRef, ...]
    acceptors: tuple[StateRef, ...]


@dataclass(frozen=True)
class CigNode:
    component: str
    state: str
    kinds: frozenset[Kind]

    def __post_init__(self):
        check_identifier(self.component, "component name")
        check_identifier(self.state, "state name")
        kinds = frozenset(self.kinds)
        object.__setattr__(self, "kinds", kinds)
        if not kinds:
            raise ValueError(f"node {self.component}.{self.state} has no kinds")
        if Kind.REMOVED in kinds:
            raise ValueError("removed states may not appear as graph nodes")
        if Kind.INTERMEDIATE in kinds and len(kinds) > 1:
            raise ValueError("an intermediate state carries no other kind")

    @property
    def ref(self) -> StateRef:
        return (self.component, self.state)


@dataclass(frozen=True)
class CigEdge:
    """A providing state feeding a requiring state of another component."""

    source: StateRef
    target: StateRef
    service: ServiceName

    def __post_init__(self):
        object.__setattr__(self, "source", (self.source[0], self.source[1]))
        object.__setattr__(self, "target", (self.target[0], self.target[1]))
        object.__setattr__(self, "service", ServiceName(self.service))
        if self.source[0] == self.target[0]:
            raise ValueError(f"edge within one component: {self.source} -> {self.target}")


@dataclass(frozen=True)
class Cig:
    """The interaction graph: classified interface states plus labeled edges."""

    components: tuple[str, ...]
    removed: tuple[StateRef, ...]
    nodes: tuple[CigNode, ...]
    edges: tuple[CigEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "removed", tuple((c, s) for c, s in self.removed))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        known = set()
        for node in self.nodes:
            if node.component not in self.components:
                raise ValueError(f"node component {node.component!r} not in component list")
            if node.ref in known:
                raise ValueError(f"duplicate node {node.ref}")
            known.add(node.ref)
        by_ref = {node.ref: node for node in self.nodes}
        for edge in self.edges:
            for ref in (edge.source, edge.target):
                if ref not in by_ref:
                    raise ValueError(f"edge endpoint {ref} is not a node")
            if Kind.PROVIDED not in by_ref[edge.source].kinds:
                raise ValueError(f"edge source {edge.source} is not a provided interface")
            if Kind.REQUIRED not in by_ref[edge.target].kinds:
                raise ValueError(f"edge target {edge.target} is not a required interface")
        for ref in self.removed:
            if ref in known:
                raise ValueError(f"removed state {ref} still appears as a node")

    def node(self, component: str, state: str) -> CigNode:
        for n in self.nodes:
            if n.component == component and n.state == state:
                return n
        raise KeyError((component, state))


def _emissions(chart: Statechart, state: str) -> set[ServiceName]:
    return {a.action for t in chart.outgoing(state) for a in t.actions}


def _triggers(chart: Statechart, state: str) -> set[ServiceName]:
    return {t.event for t in chart.outgoing(state) if t.event is not None}


def cross_services(
    charts: ChartSet, excluded: frozenset[StateRef] = frozenset()
) -> dict[ServiceName, ServiceSides]:
    """Map each service to the states that emit it and the states that accept it.

    Only services with at least one emitter and one acceptor in different
    components are kept; one-sided names are environment services. States in
    ``excluded`` are ignored entirely. Keys are sorted; sides follow chart and
    state declaration order.
    """
    emitters: dict[ServiceName, list[StateRef]] = {}
    acceptors: dict[ServiceName, list[StateRef]] = {}
    for chart in charts:
        for state in chart.states:
            ref = (chart.component_name, state)
            if ref in excluded:
                continue
            for service in sorted(_emissions(chart, state)):
                emitters.setdefault(service, []).append(ref)
            for service in sorted(_triggers(chart, state)):
                acceptors.setdefault(service, []).append(ref)
    out: dict[ServiceName, ServiceSides] = {}
    for service in sorted(set(emitters) & set(acceptors)):
        emit = [
            e
            for e in emitters[service]
            if any(a[0] != e[0] for a in acceptors[service])
        ]
        accept = [
            a
            for a in acceptors[service]
            if any(e[0] != a[0] for e in emitters[service])
        ]
        if emit and accept:
            out[service] = ServiceSides(emitters=tuple(emit), acceptors=tuple(accept))
    return out


def find_switching_states(charts: ChartSet) -> frozenset[StateRef]:
    """States whose outgoing transitions are all automatic and all cross-emitting.

    Such a state consumes no event and only pushes work to a peer component,
    so it is not an interface in its own right and is dropped from the graph.
    """
    _require_pair(charts)
    cross = cross_services(charts)
    switching = set()
    for chart in charts:
        for state in chart.states:
            outgoing = chart.outgoing(state)
            if not outgoing:
                continue
            if all(
                t.event is None and any(a.action in cross for a in t.actions)
                for t in outgoing
            ):
                switching.add((chart.component_name, state))
    return frozenset(switching)


def classify_states(charts: ChartSet) -> dict[StateRef, frozenset[Kind]]:
    """Assign every state a kind set: Removed, Provided/Required, or Intermediate.

    Cross-service status is recomputed after switching-state removal, so a
    service whose only emitters were removed no longer marks its acceptors as
    required.
    """
    _require_pair(charts)
    removed = find_switching_states(charts)
    cross = cross_services(charts, excluded=removed)
    provided = {ref for sides in cross.values() for ref in sides.emitters}
    required = {ref for sides in cross.values() for ref in sides.acceptors}
    out: dict[StateRef, frozenset[Kind]] = {}
    for chart in charts:
        for state in chart.states:
            ref = (chart.component_name, state)
            if ref in removed:
                out[ref] = frozenset({Kind.REMOVED})
                continue
            kinds = set()
            if ref in provided:
                kinds.add(Kind.PROVIDED)
            if ref in required:
                kinds.add(Kind.REQUIRED)
            out[ref] = frozenset(kinds) if kinds else frozenset({Kind.INTERMEDIATE})
    return out


def build_cig(charts: ChartSet) -> Cig:
    """Build the interaction graph for two or more statecharts.

    Edges connect every providing emitter of a service to every requiring
    acceptor of it in another component, ordered by emitter position (chart
    order, then state order), then service name, then acceptor position.
    Raises NoInteraction when the charts share no services, or when none
    remain once switching states are removed.
    """
    _require_pair(charts)
    for chart in charts:
        extract_interfaces(chart)  # surfaces DisjointnessViolation early
    if not cross_services(charts):
        raise NoInteraction("the charts share no services; nothing interacts")
    removed = find_switching_states(charts)
    cross = cross_services(charts, excluded=removed)
    if not cross:
        raise NoInteraction("no cross-component services remain after switching-state removal")
    classification = classify_states(charts)
    order: dict[StateRef, tuple[int, int]] = {}
    for ci, chart in enumerate(charts):
        for si, state in enumerate(chart.states):
            order[(chart.component_name, state)] = (ci, si)
    nodes = tuple(
        CigNode(component=ref[0], state=ref[1], kinds=kinds)
        for ref, kinds in classification.items()
        if Kind.REMOVED not in kinds
    )
    edges = [
        CigEdge(source=emitter, target=acceptor, service=service)
        for service, sides in cross.items()
        for emitter in sides.emitters
        for acceptor in sides.acceptors
        if emitter[0] != acceptor[0]
    ]
    edges.sort(key=lambda e: (order[e.source], str(e.service), order[e.target]))
    removed_ordered = tuple(sorted(removed, key=lambda ref: order[ref]))
    return Cig(
        components=tuple(charts.names),
        removed=removed_ordered,
        nodes=nodes,
        edges=tuple(edges),
    )


def _require_pair(charts: ChartSet):
    if len(charts) < 2:
        raise ValueError("need at least two statecharts")


def cig_to_dot(cig: Cig) -> str:
    """Render the graph as DOT: one dashed cluster per component, ellipse nodes.

    Output is byte-identical for equal graphs.
    """
    lines = ["digraph CIG {", "  node [shape=ellipse];"]
    for index, component in enumerate(cig.components):
        lines.append(f"  subgraph cluster_{index} {{")
        lines.append(f'    label="{component}";')
        lines.append("    style=dashed;")
        for node in cig.nodes:
            if node.component == component:
                label = f"{node.state}\\n[{format_kinds(node.kinds)}]"
                lines.append(f'    "{component}.{node.state}" [label="{label}"];')
        lines.append("  }")
    for edge in cig.edges:
        src = f"{edge.source[0]}.{edge.source[1]}"
        dst = f"{edge.target[0]}.{edge.target[1]}"
        lines.append(f'  "{src}" -> "{dst}" [label="{edge.service}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ref_dict(ref: StateRef) -> dict:
    return {"component": ref[0], "state": ref[1]}


def cig_to_dict(cig: Cig) -> dict:
    return {
        "components": list(cig.components),
        "removed": [_ref_dict(ref) for ref in cig.removed],
        "nodes": [
            {
                "component": node.component,
                "state": node.state,
                "kinds": [k.value for k in _KIND_ORDER if k in node.kinds],
            }
            for node in cig.nodes
        ],
        "edges": [
            {
                "from": _ref_dict(edge.source),
                "to": _ref_dict(edge.target),
                "service": str(edge.service),
            }
            for edge in cig.edges
        ],
    }


def _ref_from_dict(data: object, what: str) -> StateRef:
    if not isinstance(data, dict) or not {"component", "state"} <= data.keys():
        raise SchemaError(f"{what} must be an object with 'component' and 'state'")
    return (data["component"], data["state"])


_CODE_TO_KIND = {k.value: k for k in _KIND_ORDER}


def cig_from_dict(data: object) -> Cig:
    if not isinstance(data, dict):
        raise SchemaError("CIG document must be a JSON object")
    for key in ("components", "removed", "nodes", "edges"):
        if key not in data:
            raise SchemaError(f"CIG document is missing key {key!r}")
        if not isinstance(data[key], list):
            raise SchemaError(f"CIG {key!r} must be an array")
    try:
        nodes = []
        for raw in data["nodes"]:
            if not isinstance(raw, dict) or not {"component", "state", "kinds"} <= raw.keys():
                raise SchemaError("CIG node must have 'component', 'state' and 'kinds'")
            kinds = raw["kinds"]
            if not isinstance(kinds, list) or not all(k in _CODE_TO_KIND for k in kinds):
                raise SchemaError(f"invalid kind codes in node {raw.get('state')!r}")
            nodes.append(
                CigNode(
                    component=raw["component"],
                    state=raw["state"],
                    kinds=frozenset(_CODE_TO_KIND[k] for k in kinds),
                )
            )
        edges = []
        for raw in data["edges"]:
            if not isinstance(raw, dict) or not {"from", "to", "service"} <= raw.keys():
                raise SchemaError("CIG edge must have 'from', 'to' and 'service'")
            edges.append(
                CigEdge(
                    source=_ref_from_dict(raw["from"], "edge 'from'"),
                    target=_ref_from_dict(raw["to"], "edge 'to'"),
                    service=raw["service"],
                )
            )
        return Cig(
            components=tuple(data["components"]),
            removed=tuple(_ref_from_dict(r, "removed entry") for r in data["removed"]),
            nodes=tuple(nodes),
            edges=tuple(edges),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid CIG document: {exc}") from None


def cig_to_json(cig: Cig) -> str:
    return json.dumps(cig_to_dict(cig), indent=2) + "\n"


def cig_from_json(text: str) -> Cig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return cig_from_dict(data)
