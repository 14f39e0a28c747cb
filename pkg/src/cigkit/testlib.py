"""Test libraries, their composition law, and edge-covering test generation.

When two components are composed, test cases that exercise satisfied services
become obsolete and interaction tests for the newly matched service pairs are
missing. The final library is ((t1 union t2) minus the obsolete cases) union
the generated cases, one generated case per interaction-graph edge.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .cig import Cig, CigEdge, StateRef
from .components import ServiceName, check_identifier
from .errors import DuplicateTestId, SchemaError, UnreachableProvider
from .statechart import ChartSet, Statechart, Transition


class Origin(Enum):
    LIBRARY = "library"
    GENERATED = "generated"


@dataclass(frozen=True)
class TestStep:
    """One stimulus: send an event, optionally check the landing state, check
    the emitted actions in order."""

    __test__ = False  # not a pytest case

    event: ServiceName
    expected_state: StateRef | None = None
    expected_actions: tuple[ServiceName, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "event", ServiceName(self.event))
        if self.expected_state is not None:
            component, state = self.expected_state
            object.__setattr__(self, "expected_state", (component, state))
        object.__setattr__(
            self, "expected_actions", tuple(ServiceName(a) for a in self.expected_actions)
        )


_GENERATED_PREFIX = "tnew_"


@dataclass(frozen=True)
class TestCase:
    __test__ = False

    id: str
    owner: str
    services: frozenset[ServiceName]
    steps: tuple[TestStep, ...]
    origin: Origin = Origin.LIBRARY

    def __post_init__(self):
        if not self.id or not isinstance(self.id, str):
            raise ValueError("test case id must be a nonempty string")
        check_identifier(self.owner, "owner component name")
        object.__setattr__(self, "services", frozenset(ServiceName(s) for s in self.services))
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.origin is Origin.GENERATED and not self.services:
            raise ValueError(f"generated case {self.id!r} must name its services")
        if self.origin is Origin.LIBRARY and self.id.startswith(_GENERATED_PREFIX):
            raise DuplicateTestId(
                f"id {self.id!r} uses the reserved {_GENERATED_PREFIX!r} prefix"
            )


@dataclass(frozen=True)
class TestLibrary:
    __test__ = False

    cases: tuple[TestCase, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        seen = set()
        for case in self.cases:
            if case.id in seen:
                raise DuplicateTestId(f"duplicate test id {case.id!r}")
            seen.add(case.id)

    def __iter__(self):
        return iter(self.cases)

    def __len__(self) -> int:
        return len(self.cases)

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(case.id for case in self.cases)


@dataclass(frozen=True)
class ComposedLibraryResult:
    """Outcome of composing two libraries: what was kept, dropped, added."""

    retained: TestLibrary
    removed: TestLibrary
    generated: TestLibrary
    final: TestLibrary

    def __post_init__(self):
        want = [c.id for c in self.retained] + [c.id for c in self.generated]
        got = [c.id for c in self.final]
        if want != got:
            raise ValueError("final library must be retained cases then generated cases")
        if self.retained.ids & self.removed.ids:
            raise ValueError("a case cannot be both retained and removed")


def satisfied_tests(
    t1: TestLibrary, t2: TestLibrary, s: frozenset[ServiceName]
) -> tuple[TestLibrary, TestLibrary]:
    """Split t1's cases followed by t2's into (retained, removed).

    A case is removed when its services set intersects ``s``. Raises
    DuplicateTestId when the two libraries share an id, since they were then
    not independently authored.
    """
    shared = t1.ids & t2.ids
    if shared:
        raise DuplicateTestId(f"libraries share test id {sorted(shared)[0]!r}")
    s = frozenset(ServiceName(x) for x in s)
    retained = []
    removed = []
    for case in list(t1) + list(t2):
        if case.services & s:
            removed.append(case)
        else:
            retained.append(case)
    return TestLibrary(tuple(retained)), TestLibrary(tuple(removed))


def compose_libraries(
    t1: TestLibrary,
    t2: TestLibrary,
    s: frozenset[ServiceName],
    tnew: TestLibrary,
) -> ComposedLibraryResult:
    """Apply the composition law: drop cases touching ``s``, append ``tnew``."""
    retained, removed = satisfied_tests(t1, t2, s)
    clash = (t1.ids | t2.ids) & tnew.ids
    if clash:
        raise DuplicateTestId(f"generated library reuses test id {sorted(clash)[0]!r}")
    final = TestLibrary(retained.cases + tnew.cases)
    return ComposedLibraryResult(
        retained=retained, removed=removed, generated=tnew, final=final
    )


def _event_path(chart: Statechart, goal: str) -> tuple[Transition, ...]:
    """Cheapest transition sequence from the initial state to ``goal``.

    Cost is the number of triggered transitions; automatic ones are free.
    Ties break on the event-name sequence, then on transition declaration
    order, so the result is unique.
    """
    heap: list[tuple[int, tuple[str, ...], tuple[int, ...], str]] = [
        (0, (), (), chart.initial)
    ]
    visited = set()
    while heap:
        count, events, indices, state = heapq.heappop(heap)
        if state in visited:
            continue
        visited.add(state)
        if state == goal:
            return tuple(chart.transitions[i] for i in indices)
        for i, t in enumerate(chart.transitions):
            if t.source != state or t.target in visited:
                continue
            if t.event is None:
                heapq.heappush(heap, (count, events, indices + (i,), t.target))
            else:
                heapq.heappush(
                    heap, (count + 1, events + (str(t.event),), indices + (i,), t.target)
                )
    raise UnreachableProvider(
        f"no event path reaches state {goal!r} from {chart.initial!r} "
        f"in component {chart.component_name!r}"
    )


def _setup_steps(component: str, path: tuple[Transition, ...]) -> list[TestStep]:
    """Turn a transition path into steps, one per triggered transition.

    Actions of automatic transitions taken right after a trigger are credited
    to that step, and the step's expected state is where the machine rests
    before the next trigger. Automatic transitions before the first trigger
    produce no step.
    """
    steps: list[TestStep] = []
    current: dict | None = None
    for t in path:
        if t.event is not None:
            if current is not None:
                steps.append(_close_step(component, current))
            current = {"event": t.event, "actions": [], "state": t.target}
        if current is not None:
            current["actions"].extend(a.action for a in t.actions)
            current["state"] = t.target
    if current is not None:
        steps.append(_close_step(component, current))
    return steps


def _close_step(component: str, draft: dict) -> TestStep:
    return TestStep(
        event=draft["event"],
        expected_state=(component, draft["state"]),
        expected_actions=tuple(draft["actions"]),
    )


def generate_new_tests(
    cig: Cig, charts: ChartSet, warn: Callable[[str], None] | None = None
) -> TestLibrary:
    """Generate one test case per interaction edge.

    Each case drives the emitting component from its initial state to the
    providing state along the cheapest event path, then fires the trigger of
    that state's emitting transition and expects the edge's service among the
    emitted actions. The expected landing state on the accepting side is
    recorded only when it is unambiguous; ``warn`` hears about omissions.
    """
    by_name = {chart.component_name: chart for chart in charts}
    for component in cig.components:
        if component not in by_name:
            raise SchemaError(f"CIG references component {component!r} with no statechart")
    cases = []
    for edge in cig.edges:
        emitter_chart = by_name[edge.source[0]]
        acceptor_chart = by_name[edge.target[0]]
        for chart, (_, state) in ((emitter_chart, edge.source), (acceptor_chart, edge.target)):
            if state not in chart.states:
                raise SchemaError(
                    f"CIG references state {state!r} missing from {chart.component_name!r}"
                )
        case_id = "_".join(
            (
                "tnew",
                edge.source[0],
                edge.source[1],
                str(edge.service),
                edge.target[0],
                edge.target[1],
            )
        )
        final = _final_step(case_id, edge, emitter_chart, acceptor_chart, warn)
        steps = _setup_steps(emitter_chart.component_name, _event_path(emitter_chart, edge.source[1]))
        cases.append(
            TestCase(
                id=case_id,
                owner=edge.source[0],
                services=frozenset({edge.service}),
                steps=tuple(steps) + (final,),
                origin=Origin.GENERATED,
            )
        )
    cases.sort(key=lambda c: c.id)
    return TestLibrary(tuple(cases))


def _final_step(
    case_id: str,
    edge: CigEdge,
    emitter_chart: Statechart,
    acceptor_chart: Statechart,
    warn: Callable[[str], None] | None,
) -> TestStep:
    source_state = edge.source[1]
    emitting = [
        t
        for t in emitter_chart.outgoing(source_state)
        if t.event is not None and any(a.action == edge.service for a in t.actions)
    ]
    if not emitting:
        raise UnreachableProvider(
            f"state {source_state!r} of {emitter_chart.component_name!r} has no "
            f"triggered transition emitting {edge.service!r}"
        )
    trigger = emitting[0]
    accepting = [
        t for t in acceptor_chart.outgoing(edge.target[1]) if t.event == edge.service
    ]
    if len(accepting) == 1:
        expected_state = (acceptor_chart.component_name, accepting[0].target)
    else:
        expected_state = None
        if warn is not None:
            warn(
                f"{case_id}: expected state omitted, {len(accepting)} transitions "
                f"accept {edge.service!r} in state {edge.target[1]!r}"
            )
    return TestStep(
        event=trigger.event,
        expected_state=expected_state,
        expected_actions=tuple(a.action for a in trigger.actions),
    )


def _step_to_dict(step: TestStep) -> dict:
    data: dict = {"event": str(step.event)}
    if step.expected_state is not None:
        data["expected_state"] = {
            "component": step.expected_state[0],
            "state": step.expected_state[1],
        }
    data["expected_actions"] = [str(a) for a in step.expected_actions]
    return data


def _case_to_dict(case: TestCase) -> dict:
    return {
        "id": case.id,
        "owner": case.owner,
        "origin": case.origin.value,
        "services": sorted(str(s) for s in case.services),
        "steps": [_step_to_dict(s) for s in case.steps],
    }


def library_to_dict(library: TestLibrary) -> dict:
    return {"cases": [_case_to_dict(c) for c in library.cases]}


def _step_from_dict(data: object) -> TestStep:
    if not isinstance(data, dict) or "event" not in data:
        raise SchemaError("test step must be an object with an 'event'")
    expected_state = None
    if "expected_state" in data:
        ref = data["expected_state"]
        if not isinstance(ref, dict) or not {"component", "state"} <= ref.keys():
            raise SchemaError("'expected_state' must have 'component' and 'state'")
        expected_state = (ref["component"], ref["state"])
    actions = data.get("expected_actions", [])
    if not isinstance(actions, list):
        raise SchemaError("'expected_actions' must be an array")
    try:
        return TestStep(
            event=data["event"],
            expected_state=expected_state,
            expected_actions=tuple(actions),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid test step: {exc}") from None


def _case_from_dict(data: object) -> TestCase:
    if not isinstance(data, dict):
        raise SchemaError("test case must be a JSON object")
    for key in ("id", "owner", "services", "steps"):
        if key not in data:
            raise SchemaError(f"test case is missing key {key!r}")
    origin_code = data.get("origin", Origin.LIBRARY.value)
    try:
        origin = Origin(origin_code)
    except ValueError:
        raise SchemaError(f"unknown origin {origin_code!r}") from None
    if not isinstance(data["services"], list) or not isinstance(data["steps"], list):
        raise SchemaError("test case 'services' and 'steps' must be arrays")
    try:
        return TestCase(
            id=data["id"],
            owner=data["owner"],
            services=frozenset(data["services"]),
            steps=tuple(_step_from_dict(s) for s in data["steps"]),
            origin=origin,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid test case: {exc}") from None


def library_from_dict(data: object) -> TestLibrary:
    if not isinstance(data, dict) or "cases" not in data:
        raise SchemaError("test library must be an object with a 'cases' array")
    if not isinstance(data["cases"], list):
        raise SchemaError("'cases' must be an array")
    return TestLibrary(tuple(_case_from_dict(c) for c in data["cases"]))


def library_to_json(library: TestLibrary) -> str:
    return json.dumps(library_to_dict(library), indent=2) + "\n"


def library_from_json(text: str) -> TestLibrary:
    return library_from_dict(_loads(text))


def composed_result_to_dict(result: ComposedLibraryResult) -> dict:
    return {
        "retained": library_to_dict(result.retained),
        "removed": library_to_dict(result.removed),
        "generated": library_to_dict(result.generated),
        "final": library_to_dict(result.final),
    }


def composed_result_from_dict(data: object) -> ComposedLibraryResult:
    if not isinstance(data, dict):
        raise SchemaError("composed library result must be a JSON object")
    parts = {}
    for key in ("retained", "removed", "generated", "final"):
        if key not in data:
            raise SchemaError(f"composed library result is missing key {key!r}")
        parts[key] = library_from_dict(data[key])
    try:
        return ComposedLibraryResult(**parts)
    except ValueError as exc:
        raise SchemaError(f"invalid composed library result: {exc}") from None


def composed_result_to_json(result: ComposedLibraryResult) -> str:
    return json.dumps(composed_result_to_dict(result), indent=2) + "\n"


def composed_result_from_json(text: str) -> ComposedLibraryResult:
    return composed_result_from_dict(_loads(text))


def _loads(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
