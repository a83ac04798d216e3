"""
Analyzer Exceptions - core/errors.py
One hierarchy for every failure the analysis modules can raise
"""

from typing import Iterable, List, Sequence, Tuple


class SyncshapeError(Exception):
    """Base class for all analyzer errors"""


# ==================== NETWORK ====================

class NetworkError(SyncshapeError):
    """Malformed channel graph"""


class BoundViolation(NetworkError):
    """A channel bound is below the minimum delivery time of 1"""


class DuplicateChannel(NetworkError):
    """The same directed channel was listed twice"""


class UnknownAgent(NetworkError):
    """An agent reference outside 0..n-1"""


class SelfChannel(NetworkError):
    """A channel from an agent to itself"""


class ConnectivityError(NetworkError):
    """A protocol needs a strongly connected network"""


class NetworkProblems(NetworkError):
    """Several problems found in one network description"""

    def __init__(self, problems: Sequence[NetworkError]):
        self.problems: List[NetworkError] = list(problems)
        super().__init__(f"{len(self.problems)} network problems: " + "; ".join(str(p) for p in self.problems))


# ==================== SIMULATION ====================

class SimulationError(SyncshapeError):
    """Execution or enumeration failure"""


class InvalidDelay(SimulationError):
    """A delivery delay outside [1, b] or missing for a send"""


class UnknownChannel(SimulationError):
    """A protocol tried to send on a channel that does not exist"""


class ExplosionGuard(SimulationError):
    """Environment enumeration grew past the configured ceiling"""

    def __init__(self, ceiling: int, generated: int):
        self.ceiling = ceiling
        self.generated = generated
        super().__init__(
            f"environment enumeration exceeded the ceiling of {ceiling} runs "
            f"(generated {generated}); raise --ceiling or shrink the scenario"
        )


# ==================== CAUSALITY / STRUCTURES ====================

class CausalityError(SyncshapeError):
    """Causal graph query failure"""


class HorizonExceeded(CausalityError):
    """A query reaches past the simulated horizon"""


class StructureError(SyncshapeError):
    """Structure search failure"""


class IntervalError(StructureError):
    """Structure interval with t > t'"""


class StructureQueryError(StructureError):
    """Degenerate structure query (k = 0 or an empty group)"""


# ==================== EPISTEMICS ====================

class EpistemicError(SyncshapeError):
    """Formula evaluation failure"""


class NonExhaustiveBundle(EpistemicError):
    """Knowledge was requested over a sampled bundle"""


class EmptyGroup(EpistemicError):
    """Common knowledge over an empty group"""


class UnknownEvent(EpistemicError):
    """Occurrence proposition over an event the scenario never declares"""


class FormulaSyntaxError(EpistemicError):
    """Textual formula could not be parsed"""

    def __init__(self, text: str, position: int, message: str):
        self.text = text
        self.position = position
        super().__init__(f"{message} at column {position + 1} in {text!r}")


# ==================== SNAPSHOT ====================

class SnapshotError(SyncshapeError):
    """Snapshot episode failure"""


class NoTrigger(SnapshotError):
    """No ext_Snap input present in the environment"""


class NonSimultaneous(SnapshotError):
    """Agents recorded at different times"""


# ==================== COORDINATION ====================

class CoordinationError(SyncshapeError):
    """Response ordering failure"""


class OrderingError(CoordinationError):
    """Malformed response ordering"""


class TriggerNotInitial(CoordinationError):
    """An ordering edge points into a trigger"""


class UnknownResponse(CoordinationError):
    """A response id that the ordering does not declare"""


# ==================== SCENARIOS ====================

class ScenarioError(SyncshapeError):
    """Scenario file failure"""


class ParseError(ScenarioError):
    """Scenario file missing or not valid JSON"""


class ValidationError(ScenarioError):
    """Aggregated scenario validation failures, each with its location"""

    def __init__(self, issues: Iterable[Tuple[str, str]]):
        self.issues: List[Tuple[str, str]] = list(issues)
        lines = [f"  • {location}: {message}" for location, message in self.issues]
        super().__init__(
            f"❌ Scenario validation failed with {len(self.issues)} issue(s):\n" + "\n".join(lines)
        )

    @property
    def locations(self) -> Sequence[str]:
        return [location for location, _ in self.issues]
