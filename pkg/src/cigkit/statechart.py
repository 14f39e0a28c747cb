"""Statechart model, its textual format, and interface extraction.

Machines are flat: named states, one initial state, and transitions carrying
an optional trigger event, an optional opaque guard, and a list of emitted
actions. The event names a machine accepts form its provided interface; the
action names it emits form its required interface.

Text format, one declaration per line. ``#`` starts a comment (except inside
guard brackets) and blank lines are ignored:

    component Vending
    state Idle
    state Busy
    initial Idle
    transition Idle -> Busy on start guard [credit>0] do ping(1,2) do pong
    transition Busy -> Idle do reset
    end

A transition without an ``on`` clause is automatic: it is taken spontaneously
on entering its source state. Guards and action parameters are opaque text;
they round-trip through the serializer but are never interpreted. The
parameter token ``2..max`` style denotes a value range and is kept verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

from .components import _IDENTIFIER_RE, Component, ServiceName, check_identifier
from .errors import (
    DisjointnessViolation,
    DuplicateComponent,
    DuplicateState,
    MissingInitial,
    ParseError,
    UnknownState,
)

_PARAM_FORBIDDEN = set(",()[]#") | set(" \t\r\n\f\v")


def _check_param_token(token: str) -> str:
    if not token or any(ch in _PARAM_FORBIDDEN for ch in token):
        raise ValueError(f"invalid parameter token: {token!r}")
    return token


@dataclass(frozen=True)
class ActionEmission:
    """An emitted action with verbatim, uninterpreted parameter tokens."""

    action: ServiceName
    params: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "action", ServiceName(self.action))
        object.__setattr__(self, "params", tuple(_check_param_token(p) for p in self.params))


@dataclass(frozen=True)
class Transition:
    """A directed transition. ``event`` is None for automatic transitions."""

    source: str
    target: str
    event: ServiceName | None = None
    guard: str | None = None
    actions: tuple[ActionEmission, ...] = ()

    def __post_init__(self):
        check_identifier(self.source, "state name")
        check_identifier(self.target, "state name")
        if self.event is not None:
            object.__setattr__(self, "event", ServiceName(self.event))
        if self.guard is not None and ("[" in self.guard or "]" in self.guard or "\n" in self.guard):
            raise ValueError(f"guard text may not contain brackets or newlines: {self.guard!r}")
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class Statechart:
    """A flat state machine owned by one component."""

    component_name: str
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        check_identifier(self.component_name, "component name")
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        seen = set()
        for state in states:
            check_identifier(state, "state name")
            if state in seen:
                raise DuplicateState(f"duplicate state {state!r} in {self.component_name!r}")
            seen.add(state)
        if self.initial not in seen:
            raise UnknownState(
                f"initial state {self.initial!r} is not declared in {self.component_name!r}"
            )
        object.__setattr__(self, "transitions", tuple(self.transitions))
        for t in self.transitions:
            for endpoint in (t.source, t.target):
                if endpoint not in seen:
                    raise UnknownState(
                        f"transition endpoint {endpoint!r} is not declared in {self.component_name!r}"
                    )

    def outgoing(self, state: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.source == state)


@dataclass(frozen=True)
class ChartSet:
    """An ordered collection of statecharts with unique component names."""

    charts: tuple[Statechart, ...]

    def __post_init__(self):
        object.__setattr__(self, "charts", tuple(self.charts))
        seen = set()
        for chart in self.charts:
            if chart.component_name in seen:
                raise DuplicateComponent(f"duplicate component {chart.component_name!r}")
            seen.add(chart.component_name)

    def __iter__(self):
        return iter(self.charts)

    def __len__(self) -> int:
        return len(self.charts)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.component_name for c in self.charts)

    def get(self, name: str) -> Statechart:
        for chart in self.charts:
            if chart.component_name == name:
                return chart
        raise KeyError(name)


def _strip_comment(line: str) -> str:
    # '#' starts a comment except inside guard brackets
    depth = 0
    for i, ch in enumerate(line):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        elif ch == "#" and depth == 0:
            return line[:i]
    return line


class _Scanner:
    """Cursor over one declaration line, reporting 1-based columns."""

    def __init__(self, line: str, lineno: int):
        self.line = line
        self.lineno = lineno
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self._skip_ws()
        return self.pos >= len(self.line)

    def take_word(self, what: str) -> tuple[str, int]:
        self._skip_ws()
        start = self.pos
        while (
            self.pos < len(self.line)
            and not self.line[self.pos].isspace()
            and self.line[self.pos] not in "(["
        ):
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"expected {what}", self.lineno, start + 1)
        return self.line[start : self.pos], start + 1

    def take_identifier(self, what: str) -> str:
        word, column = self.take_word(what)
        if not _IDENTIFIER_RE.match(word):
            raise ParseError(f"invalid {what}: {word!r}", self.lineno, column)
        return word

    def expect(self, literal: str):
        word, column = self.take_word(f"'{literal}'")
        if word != literal:
            raise ParseError(f"expected {literal!r}, found {word!r}", self.lineno, column)

    def take_guard_text(self) -> str:
        self._skip_ws()
        column = self.pos + 1
        if self.pos >= len(self.line) or self.line[self.pos] != "[":
            raise ParseError("expected '[' after 'guard'", self.lineno, column)
        end = self.line.find("]", self.pos + 1)
        if end < 0:
            raise ParseError("unterminated guard, missing ']'", self.lineno, column)
        text = self.line[self.pos + 1 : end]
        self.pos = end + 1
        return text

    def take_action(self) -> ActionEmission:
        name = self.take_identifier("action name")
        params: tuple[str, ...] = ()
        if self.pos < len(self.line) and self.line[self.pos] == "(":
            column = self.pos + 1
            end = self.line.find(")", self.pos + 1)
            if end < 0:
                raise ParseError("unterminated parameter list, missing ')'", self.lineno, column)
            inner = self.line[self.pos + 1 : end]
            self.pos = end + 1
            if inner.strip():
                tokens = []
                for raw in inner.split(","):
                    token = raw.strip()
                    try:
                        tokens.append(_check_param_token(token))
                    except ValueError:
                        raise ParseError(f"invalid parameter token {token!r}", self.lineno, column) from None
                params = tuple(tokens)
        return ActionEmission(action=name, params=params)

    def finish(self):
        if not self.at_end():
            raise ParseError("unexpected trailing text", self.lineno, self.pos + 1)


def _parse_transition_clauses(sc: _Scanner) -> Transition:
    source = sc.take_identifier("source state")
    source_col = sc.pos - len(source) + 1
    sc.expect("->")
    target = sc.take_identifier("target state")
    target_col = sc.pos - len(target) + 1
    event = None
    guard = None
    actions: list[ActionEmission] = []
    stage = 0  # 0: nothing yet, 1: after 'on', 2: after 'guard', 3: in 'do' list
    while not sc.at_end():
        word, column = sc.take_word("'on', 'guard' or 'do'")
        if word == "on":
            if stage >= 1:
                raise ParseError("'on' must appear once, before 'guard' and 'do'", sc.lineno, column)
            event = sc.take_identifier("event name")
            stage = 1
        elif word == "guard":
            if stage >= 2:
                raise ParseError("'guard' must appear once, before any 'do'", sc.lineno, column)
            guard = sc.take_guard_text()
            stage = 2
        elif word == "do":
            actions.append(sc.take_action())
            stage = 3
        else:
            raise ParseError(f"expected 'on', 'guard' or 'do', found {word!r}", sc.lineno, column)
    t = Transition(source=source, target=target, event=event, guard=guard, actions=tuple(actions))
    return t, source_col, target_col


def parse_statechart(text: str) -> Statechart:
    """Parse one statechart document, validating structure as it goes.

    Raises ParseError on malformed lines, DuplicateComponent on a second
    header, DuplicateState, MissingInitial, and UnknownState when the initial
    state or a transition endpoint was never declared, all with the offending
    line number.
    """
    component_name: str | None = None
    states: list[str] = []
    state_set: set[str] = set()
    initial: str | None = None
    initial_line = 0
    transitions: list[tuple[Transition, int, int, int]] = []
    ended = False
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        content = _strip_comment(raw)
        if not content.strip():
            continue
        sc = _Scanner(content, lineno)
        keyword, column = sc.take_word("a declaration")
        if ended:
            raise ParseError("content after 'end'", lineno, column)
        if keyword == "component":
            name = sc.take_identifier("component name")
            if component_name is not None:
                raise DuplicateComponent(
                    f"second 'component' header (already named {component_name!r})", lineno, column
                )
            component_name = name
        elif component_name is None:
            raise ParseError("expected 'component' header first", lineno, column)
        elif keyword == "state":
            name = sc.take_identifier("state name")
            if name in state_set:
                raise DuplicateState(f"duplicate state {name!r}", lineno, column)
            states.append(name)
            state_set.add(name)
        elif keyword == "initial":
            if initial is not None:
                raise ParseError("duplicate 'initial' declaration", lineno, column)
            initial = sc.take_identifier("initial state name")
            initial_line = lineno
        elif keyword == "transition":
            t, source_col, target_col = _parse_transition_clauses(sc)
            transitions.append((t, lineno, source_col, target_col))
        elif keyword == "end":
            ended = True
        else:
            raise ParseError(f"unknown declaration {keyword!r}", lineno, column)
        sc.finish()
    if component_name is None:
        raise ParseError("missing 'component' header", len(lines) or 1)
    if initial is None:
        raise MissingInitial(f"component {component_name!r} declares no initial state")
    if initial not in state_set:
        raise UnknownState(f"initial state {initial!r} is not declared", initial_line)
    for t, lineno, source_col, target_col in transitions:
        if t.source not in state_set:
            raise UnknownState(f"unknown state {t.source!r}", lineno, source_col)
        if t.target not in state_set:
            raise UnknownState(f"unknown state {t.target!r}", lineno, target_col)
    if not ended:
        raise ParseError("missing 'end'", len(lines) or 1)
    return Statechart(
        component_name=component_name,
        states=tuple(states),
        initial=initial,
        transitions=tuple(t for t, _, _, _ in transitions),
    )


def serialize_statechart(chart: Statechart) -> str:
    """Canonical text form. parse(serialize(chart)) is structurally equal to chart."""
    lines = [f"component {chart.component_name}"]
    lines.extend(f"state {s}" for s in chart.states)
    lines.append(f"initial {chart.initial}")
    for t in chart.transitions:
        parts = [f"transition {t.source} -> {t.target}"]
        if t.event is not None:
            parts.append(f"on {t.event}")
        if t.guard is not None:
            parts.append(f"guard [{t.guard}]")
        for a in t.actions:
            if a.params:
                parts.append(f"do {a.action}({','.join(a.params)})")
            else:
                parts.append(f"do {a.action}")
        lines.append(" ".join(parts))
    lines.append("end")
    return "\n".join(lines) + "\n"


def extract_interfaces(chart: Statechart) -> Component:
    """Derive the component's interface sets from its statechart.

    Provided services are the trigger event names the machine accepts,
    required services the action names it emits. A name on both sides makes
    the component ill-formed and raises DisjointnessViolation.
    """
    triggers = {t.event for t in chart.transitions if t.event is not None}
    actions = {a.action for t in chart.transitions for a in t.actions}
    overlap = triggers & actions
    if overlap:
        raise DisjointnessViolation(
            f"component {chart.component_name!r} both accepts and emits: "
            + ", ".join(sorted(overlap))
        )
    return Component(
        name=chart.component_name,
        provided=frozenset(triggers),
        required=frozenset(actions),
    )
