"""
Knowledge Evaluation - core/epistemics.py
Formulas over occurrence propositions with K_i and C_G, evaluated at points
of an exhaustive run bundle through vectorised truth tables
"""

import logging
import re
import weakref
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Sequence, Set, Union

import numpy as np

from core.errors import EmptyGroup, FormulaSyntaxError, HorizonExceeded, NonExhaustiveBundle, UnknownEvent
from core.simulator import ContextParams, SystemBundle
from utils.analysis_logger import log_event

logger = logging.getLogger(__name__)


# ==================== FORMULAS ====================

@dataclass(frozen=True)
class Occ:
    event: str

    def __str__(self) -> str:
        return f"occ({self.event})"


@dataclass(frozen=True)
class Not:
    sub: "Formula"

    def __str__(self) -> str:
        return f"!{_wrap(self.sub)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class K:
    agent: int
    sub: "Formula"

    def __str__(self) -> str:
        return f"K[{self.agent}] {_wrap(self.sub)}"


@dataclass(frozen=True)
class C:
    group: FrozenSet[int]
    sub: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "group", frozenset(self.group))
        if not self.group:
            raise EmptyGroup("common knowledge needs a nonempty group")

    def __str__(self) -> str:
        members = ",".join(str(i) for i in sorted(self.group))
        return f"C{{{members}}} {_wrap(self.sub)}"


Formula = Union[Occ, Not, And, K, C]


def _wrap(formula: Formula) -> str:
    return f"({formula})" if isinstance(formula, And) else str(formula)


def events_of(formula: Formula) -> Set[str]:
    if isinstance(formula, Occ):
        return {formula.event}
    if isinstance(formula, And):
        return events_of(formula.left) | events_of(formula.right)
    return events_of(formula.sub)


def nested_ck(groups: Sequence[Iterable[int]], event: str) -> Formula:
    """C_{I^k} C_{I^(k-1)} ... C_{I^1} occ(e); groups listed innermost first"""
    if not groups:
        raise EmptyGroup("nested common knowledge needs k >= 1 groups")
    formula: Formula = Occ(event)
    for group in groups:
        formula = C(frozenset(group), formula)
    return formula


def nested_knowledge(agents: Sequence[int], event: str) -> Formula:
    """K_{i_k} ... K_{i_1} occ(e); agents listed innermost first"""
    formula: Formula = Occ(event)
    for agent in agents:
        formula = K(agent, formula)
    return formula


# ==================== PARSER ====================

_TOKEN = re.compile(r"\s*(?:(occ)\s*\(\s*([A-Za-z0-9_.\-]+)\s*\)|K\[\s*([^\]]*?)\s*\]|C\{\s*([^}]*?)\s*\}|([!&()]))")


def parse_formula(text: str, names: Sequence[str] = ()) -> Formula:
    """Parse `occ(e)`, `K[i] φ`, `C{i,j} φ`, `!φ`, `φ & ψ` with parentheses

    `!`, `K` and `C` bind tighter than `&`; agents are indices or names.
    """
    tokens = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        if not match:
            raise FormulaSyntaxError(text, position, "unexpected input")
        start = match.start() + (len(match.group(0)) - len(match.group(0).lstrip()))
        if match.group(1):
            tokens.append(("occ", match.group(2), start))
        elif match.group(3) is not None:
            tokens.append(("K", _agent(match.group(3), names, text, start), start))
        elif match.group(4) is not None:
            members = [m for m in match.group(4).split(",") if m.strip()]
            if not members:
                raise FormulaSyntaxError(text, start, "empty group in C{...}")
            tokens.append(("C", frozenset(_agent(m, names, text, start) for m in members), start))
        else:
            tokens.append((match.group(5), None, start))
        position = match.end()

    parser = _Parser(tokens, text)
    formula = parser.conjunction()
    if parser.index != len(tokens):
        raise FormulaSyntaxError(text, tokens[parser.index][2], "trailing input")
    return formula


def _agent(ref: str, names: Sequence[str], text: str, position: int) -> int:
    ref = ref.strip()
    if ref.isdigit():
        return int(ref)
    if ref in names:
        return list(names).index(ref)
    raise FormulaSyntaxError(text, position, f"unknown agent {ref!r}")


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.index = 0

    def _peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def conjunction(self) -> Formula:
        formula = self.unary()
        while self._peek() is not None and self._peek()[0] == "&":
            self.index += 1
            formula = And(formula, self.unary())
        return formula

    def unary(self) -> Formula:
        token = self._peek()
        if token is None:
            raise FormulaSyntaxError(self.text, len(self.text), "formula ends early")
        kind, value, position = token
        self.index += 1
        if kind == "occ":
            return Occ(value)
        if kind == "!":
            return Not(self.unary())
        if kind == "K":
            return K(value, self.unary())
        if kind == "C":
            return C(value, self.unary())
        if kind == "(":
            formula = self.conjunction()
            closing = self._peek()
            if closing is None or closing[0] != ")":
                raise FormulaSyntaxError(self.text, position, "unbalanced parenthesis")
            self.index += 1
            return formula
        raise FormulaSyntaxError(self.text, position, f"unexpected {kind!r}")


# ==================== MODEL CHECKING ====================

class Point(NamedTuple):
    run: int
    time: int


def evaluation_horizon(ctx: ContextParams) -> int:
    """Last time whose relevant null-message edges all land inside the horizon"""
    return ctx.horizon - ctx.network.max_bound


class ModelChecker:
    """Truth tables of shape (time, run) over one bundle

    Indistinguishability classes come from local-state digests; each
    subformula's table is computed once and then only read.
    """

    def __init__(self, bundle: SystemBundle, allow_sampled: bool = False):
        if not bundle.exhaustive and not allow_sampled:
            raise NonExhaustiveBundle(
                "knowledge over a sampled bundle is unsound; build an exhaustive bundle "
                "or pass the sampled-knowledge override"
            )
        self.bundle = bundle
        self.net = bundle.context.network
        self.last_time = evaluation_horizon(bundle.context)
        self.n_runs = len(bundle.runs)
        self.event_ids = bundle.event_ids
        self._tables: Dict[Formula, np.ndarray] = {}
        self._classes: List[List[np.ndarray]] = []
        self._class_counts: List[List[int]] = []
        for agent in range(self.net.n_agents):
            per_time, counts = [], []
            for t in range(max(self.last_time, -1) + 1):
                ids: Dict[str, int] = {}
                row = np.fromiter(
                    (ids.setdefault(run.local_states[agent][t].digest, len(ids)) for run in bundle.runs),
                    dtype=np.int64, count=self.n_runs,
                )
                per_time.append(row)
                counts.append(len(ids))
            self._classes.append(per_time)
            self._class_counts.append(counts)
        log_event("model_checker_ready", {
            "protocol": bundle.protocol_id, "runs": self.n_runs, "evaluation_horizon": self.last_time,
        })

    # ==================== TABLES ====================

    def table(self, formula: Formula) -> np.ndarray:
        cached = self._tables.get(formula)
        if cached is not None:
            return cached
        if self.last_time < 0:
            raise HorizonExceeded(
                f"horizon {self.bundle.context.horizon} leaves no evaluation points "
                f"(max bound {self.net.max_bound})"
            )
        table = self._compute(formula)
        table.setflags(write=False)
        self._tables[formula] = table
        return table

    def _compute(self, formula: Formula) -> np.ndarray:
        if isinstance(formula, Occ):
            if formula.event not in self.event_ids:
                raise UnknownEvent(f"occ({formula.event}) names no input slot or response of this bundle")
            times = np.array([
                t if (t := run.occurrence_time(formula.event)) is not None else np.iinfo(np.int64).max
                for run in self.bundle.runs
            ], dtype=np.int64)
            return np.arange(self.last_time + 1)[:, None] >= times[None, :]
        if isinstance(formula, Not):
            return ~self.table(formula.sub)
        if isinstance(formula, And):
            return self.table(formula.left) & self.table(formula.right)
        if isinstance(formula, K):
            return self.know(self.net.check_agent(formula.agent), self.table(formula.sub))
        if isinstance(formula, C):
            return self._common(formula)
        raise TypeError(f"not a formula: {formula!r}")

    def know(self, agent: int, truth: np.ndarray) -> np.ndarray:
        """K_i applied slice by slice: true where no run in the class falsifies"""
        known = np.empty_like(truth)
        for t in range(self.last_time + 1):
            classes = self._classes[agent][t]
            spoiled = np.bincount(classes, weights=~truth[t], minlength=self._class_counts[agent][t]) > 0
            known[t] = ~spoiled[classes]
        return known

    def _common(self, formula: C) -> np.ndarray:
        """Greatest fixpoint of S = φ ∧ ⋀_{i∈G} K_i S"""
        members = [self.net.check_agent(i) for i in sorted(formula.group)]
        base = self.table(formula.sub)
        current = base.copy()
        while True:
            refined = base.copy()
            for agent in members:
                refined &= self.know(agent, current)
            if np.array_equal(refined, current):
                return current
            current = refined

    # ==================== QUERIES ====================

    def check_point(self, point: Point):
        run, time = point
        if not 0 <= run < self.n_runs:
            raise HorizonExceeded(f"run {run} is not in a bundle of {self.n_runs}")
        if not 0 <= time <= self.last_time:
            raise HorizonExceeded(f"time {time} is past the evaluation horizon {self.last_time}")

    def evaluate(self, point: Point, formula: Formula) -> bool:
        point = Point(*point)
        self.check_point(point)
        return bool(self.table(formula)[point.time, point.run])

    def satisfying_points(self, formula: Formula) -> Set[Point]:
        times, runs = np.nonzero(self.table(formula))
        return {Point(int(r), int(t)) for t, r in zip(times, runs)}

    def first_true_times(self, formula: Formula) -> np.ndarray:
        """Per run, the earliest evaluation time where formula holds, -1 if never"""
        table = self.table(formula)
        first = np.argmax(table, axis=0)
        return np.where(table.any(axis=0), first, -1)


_checkers: "weakref.WeakKeyDictionary[SystemBundle, ModelChecker]" = weakref.WeakKeyDictionary()


def checker_for(bundle: SystemBundle, allow_sampled: bool = False) -> ModelChecker:
    """Shared checker per bundle, so fixpoints are computed once"""
    checker = _checkers.get(bundle)
    if checker is None:
        checker = ModelChecker(bundle, allow_sampled)
        _checkers[bundle] = checker
    return checker


def evaluate(bundle: SystemBundle, point: Point, formula: Formula, allow_sampled: bool = False) -> bool:
    """(R, r, t) ⊨ φ"""
    verdict = checker_for(bundle, allow_sampled).evaluate(Point(*point), formula)
    log_event("formula_evaluated", {"formula": str(formula), "point": tuple(point), "verdict": verdict})
    return verdict


def satisfying_points(bundle: SystemBundle, formula: Formula, allow_sampled: bool = False) -> Set[Point]:
    """{p : (R, p) ⊨ φ}"""
    return checker_for(bundle, allow_sampled).satisfying_points(formula)
