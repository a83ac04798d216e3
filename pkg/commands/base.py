"""
Command Module Base - commands/base.py
Shared plumbing for analyzer command modules: enable checks, bundle and run
selection, artifact output
"""

import logging
from argparse import Namespace
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

from core.errors import SimulationError
from core.simulator import Run, SystemBundle, sample_system
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


@dataclass
class CommandResult:
    """What a command hands back to the analyzer"""
    exit_code: int = EXIT_OK
    text: str = ""
    artifacts: List[Path] = field(default_factory=list)


Handler = Callable[[Scenario, Namespace], CommandResult]


class CommandModule:
    """Base class for a group of commands behind one MODULES_ENABLED switch"""

    module_name = ""

    def __init__(self, config):
        self.config = config

    def module_check(self) -> bool:
        """Check if this module is enabled"""
        return self.config.MODULES_ENABLED.get(self.module_name, False)

    def commands(self) -> Dict[str, Handler]:
        raise NotImplementedError

    # ==================== HELPERS ====================

    def seed(self, args: Namespace) -> int:
        return args.seed if getattr(args, "seed", None) is not None else self.config.DEFAULT_SEED

    def bundle(self, scenario: Scenario, args: Namespace) -> SystemBundle:
        """Exhaustive bundle, or a seeded sample when --count is given"""
        count = getattr(args, "count", None)
        if count:
            return sample_system(scenario.protocol(), scenario.context, self.seed(args), count)
        return scenario.bundle()

    @staticmethod
    def pick_run(bundle: SystemBundle, args: Namespace) -> Run:
        """--run, else --env-index, else the first run in canonical order"""
        index = args.run if getattr(args, "run", None) is not None else getattr(args, "env_index", None)
        index = 0 if index is None else index
        if not 0 <= index < len(bundle):
            raise SimulationError(f"run index {index} is outside a bundle of {len(bundle)} runs")
        return bundle[index]

    def write_artifact(self, args: Namespace, scenario: Scenario, suffix: str, text: str) -> Optional[Path]:
        """Write text under --out; nothing is written without it"""
        out = getattr(args, "out", None)
        if not out:
            return None
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{scenario.name}_{suffix}"
        path.write_text(text, encoding="utf-8")
        logger.info(f"💾 Wrote {path}")
        return path
