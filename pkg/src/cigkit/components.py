"""Components as provided/required interface sets, and their composition.

A component is described purely by the service names it offers to its peers
(``provided``) and the service names it consumes from peers or from the
environment (``required``). Two components are composable when one side
provides at least one service the other requires; the matched names form the
satisfied set and are removed from the composite's interface.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DisjointnessViolation, InvalidIdentifier, NotComposable, SchemaError

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def check_identifier(value: str, what: str = "identifier") -> str:
    """Validate a name: letters, digits and underscore, no leading digit."""
    if not isinstance(value, str) or not _IDENTIFIER_RE.match(value):
        raise InvalidIdentifier(f"invalid {what}: {value!r}")
    return value


class ServiceName(str):
    """A service interface name. A plain string validated as an identifier."""

    __slots__ = ()

    def __new__(cls, value: str) -> "ServiceName":
        if type(value) is cls:
            return value
        check_identifier(value, "service name")
        return super().__new__(cls, value)


def _service_set(values: Iterable[str]) -> frozenset[ServiceName]:
    return frozenset(ServiceName(v) for v in values)


@dataclass(frozen=True)
class Component:
    """A named pair of disjoint service-name sets.

    ``internal_map`` optionally records which provided service backs each
    required one inside the component. It is carried as inert data, stored as
    a sorted tuple of (required, provided) pairs, and dropped on composition.
    """

    name: str
    provided: frozenset[ServiceName] = frozenset()
    required: frozenset[ServiceName] = frozenset()
    internal_map: tuple[tuple[ServiceName, ServiceName], ...] = ()

    def __post_init__(self):
        check_identifier(self.name, "component name")
        object.__setattr__(self, "provided", _service_set(self.provided))
        object.__setattr__(self, "required", _service_set(self.required))
        overlap = self.provided & self.required
        if overlap:
            raise DisjointnessViolation(
                f"component {self.name!r} both provides and requires: "
                + ", ".join(sorted(overlap))
            )
        raw = self.internal_map
        items = raw.items() if isinstance(raw, Mapping) else raw
        pairs = tuple(sorted((ServiceName(k), ServiceName(v)) for k, v in items))
        if len({k for k, _ in pairs}) != len(pairs):
            raise ValueError(f"component {self.name!r}: duplicate internal_map key")
        for key, value in pairs:
            if key not in self.required:
                raise ValueError(f"component {self.name!r}: internal_map key {key!r} is not required")
            if value not in self.provided:
                raise ValueError(f"component {self.name!r}: internal_map value {value!r} is not provided")
        object.__setattr__(self, "internal_map", pairs)

    def internal_mapping(self) -> dict[ServiceName, ServiceName]:
        return dict(self.internal_map)


def make_component(
    name: str,
    provided: Iterable[str],
    required: Iterable[str],
) -> Component:
    """Build a component with the given interface sets and no internal map."""
    return Component(name=name, provided=frozenset(provided), required=frozenset(required))


def satisfied_services(c1: Component, c2: Component) -> frozenset[ServiceName]:
    """Services one component provides and the other requires (either direction)."""
    return (c1.provided & c2.required) | (c2.provided & c1.required)


def is_composable(c1: Component, c2: Component) -> bool:
    return bool(satisfied_services(c1, c2))


@dataclass(frozen=True)
class CompositionStep:
    """One pairwise composition: the operand names and the services it consumed."""

    left: str
    right: str
    satisfied: frozenset[ServiceName]

    def __post_init__(self):
        object.__setattr__(self, "satisfied", _service_set(self.satisfied))


@dataclass(frozen=True)
class CompositionResult:
    """Outcome of composing components.

    ``satisfied``, ``left_name`` and ``right_name`` describe the final pairwise
    step; ``steps`` records the whole fold in order, one entry per pair.
    """

    composed: Component
    satisfied: frozenset[ServiceName]
    left_name: str
    right_name: str
    steps: tuple[CompositionStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "satisfied", _service_set(self.satisfied))
        object.__setattr__(self, "steps", tuple(self.steps))

    def all_satisfied(self) -> frozenset[ServiceName]:
        """Union of the satisfied sets over every fold step."""
        out: frozenset[ServiceName] = frozenset()
        for step in self.steps:
            out |= step.satisfied
        return out


def compose(c1: Component, c2: Component) -> CompositionResult:
    """Compose two components, consuming the satisfied services.

    The composite provides the union of both provided sets minus the satisfied
    set, and likewise for the required sets. Raises NotComposable when no
    service matches.
    """
    satisfied = satisfied_services(c1, c2)
    if not satisfied:
        raise NotComposable(c1.name, c2.name)
    composed = Component(
        name=f"{c1.name}_x_{c2.name}",
        provided=(c1.provided | c2.provided) - satisfied,
        required=(c1.required | c2.required) - satisfied,
    )
    step = CompositionStep(left=c1.name, right=c2.name, satisfied=satisfied)
    return CompositionResult(
        composed=composed,
        satisfied=satisfied,
        left_name=c1.name,
        right_name=c2.name,
        steps=(step,),
    )


def compose_many(components: Sequence[Component]) -> CompositionResult:
    """Left-fold ``compose`` over the list in the given order.

    The fold order is recorded step by step; no order-independence is assumed.
    Raises NotComposable at the first pair with no satisfied services, naming
    that pair.
    """
    components = list(components)
    if len(components) < 2:
        raise ValueError("compose_many needs at least two components")
    steps: list[CompositionStep] = []
    accumulated = components[0]
    result = None
    for nxt in components[1:]:
        result = compose(accumulated, nxt)
        steps.extend(result.steps)
        accumulated = result.composed
    assert result is not None
    return CompositionResult(
        composed=accumulated,
        satisfied=result.satisfied,
        left_name=result.left_name,
        right_name=result.right_name,
        steps=tuple(steps),
    )


def component_to_dict(component: Component) -> dict:
    data: dict = {
        "name": component.name,
        "provided": sorted(str(s) for s in component.provided),
        "required": sorted(str(s) for s in component.required),
    }
    if component.internal_map:
        data["internal_map"] = {str(k): str(v) for k, v in component.internal_map}
    return data


def component_from_dict(data: object) -> Component:
    if not isinstance(data, dict):
        raise SchemaError("component must be a JSON object")
    try:
        name = data["name"]
        provided = data["provided"]
        required = data["required"]
    except KeyError as exc:
        raise SchemaError(f"component object is missing key {exc.args[0]!r}") from None
    if not isinstance(provided, list) or not isinstance(required, list):
        raise SchemaError("component 'provided' and 'required' must be arrays")
    internal_map = data.get("internal_map", {})
    if not isinstance(internal_map, dict):
        raise SchemaError("component 'internal_map' must be an object")
    try:
        return Component(
            name=name,
            provided=frozenset(provided),
            required=frozenset(required),
            internal_map=tuple(internal_map.items()),
        )
    except (InvalidIdentifier, ValueError, TypeError) as exc:
        if isinstance(exc, DisjointnessViolation):
            raise
        raise SchemaError(f"invalid component object: {exc}") from None


def component_to_json(component: Component) -> str:
    """Stable JSON rendering: fixed key order, sorted arrays, trailing newline."""
    return json.dumps(component_to_dict(component), indent=2) + "\n"


def component_from_json(text: str) -> Component:
    return component_from_dict(_loads(text))


def composition_result_to_dict(result: CompositionResult) -> dict:
    return {
        "left": result.left_name,
        "right": result.right_name,
        "satisfied": sorted(str(s) for s in result.satisfied),
        "composed": component_to_dict(result.composed),
        "steps": [
            {
                "left": step.left,
                "right": step.right,
                "satisfied": sorted(str(s) for s in step.satisfied),
            }
            for step in result.steps
        ],
    }


def composition_result_from_dict(data: object) -> CompositionResult:
    if not isinstance(data, dict):
        raise SchemaError("composition result must be a JSON object")
    for key in ("left", "right", "satisfied", "composed", "steps"):
        if key not in data:
            raise SchemaError(f"composition result is missing key {key!r}")
    if not isinstance(data["satisfied"], list) or not isinstance(data["steps"], list):
        raise SchemaError("composition 'satisfied' and 'steps' must be arrays")
    steps = []
    for raw in data["steps"]:
        if not isinstance(raw, dict) or not {"left", "right", "satisfied"} <= raw.keys():
            raise SchemaError("composition step must have 'left', 'right' and 'satisfied'")
        try:
            steps.append(
                CompositionStep(left=raw["left"], right=raw["right"], satisfied=frozenset(raw["satisfied"]))
            )
        except (InvalidIdentifier, TypeError) as exc:
            raise SchemaError(f"invalid composition step: {exc}") from None
    try:
        return CompositionResult(
            composed=component_from_dict(data["composed"]),
            satisfied=frozenset(data["satisfied"]),
            left_name=data["left"],
            right_name=data["right"],
            steps=tuple(steps),
        )
    except (InvalidIdentifier, TypeError) as exc:
        raise SchemaError(f"invalid composition result: {exc}") from None


def composition_result_to_json(result: CompositionResult) -> str:
    return json.dumps(composition_result_to_dict(result), indent=2) + "\n"


def composition_result_from_json(text: str) -> CompositionResult:
    return composition_result_from_dict(_loads(text))


def _loads(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
