"""
Command Coordinator - commands/__init__.py
Registers every command module and dispatches by command name, honouring
MODULES_ENABLED
"""

import logging
import time
from argparse import Namespace
from typing import Dict, List, Tuple

from commands.base import EXIT_ERROR, CommandModule, CommandResult, Handler
from commands.export import ExportCommands
from commands.knowledge import KnowledgeCommands
from commands.protocols import ProtocolCommands
from commands.simulation import SimulationCommands
from commands.theorems import TheoremCommands
from utils.analysis_logger import log_command
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)

MODULE_CLASSES = (SimulationCommands, KnowledgeCommands, ProtocolCommands, TheoremCommands, ExportCommands)


class CommandCoordinator:
    """Owns the command modules and routes each command to its handler"""

    def __init__(self, config):
        self.config = config
        self.modules: List[CommandModule] = [cls(config) for cls in MODULE_CLASSES]
        self.routes: Dict[str, Tuple[CommandModule, Handler]] = {}
        for module in self.modules:
            for name, handler in module.commands().items():
                self.routes[name] = (module, handler)
        logger.debug(f"Registered {len(self.routes)} commands from {len(self.modules)} modules")

    @property
    def command_names(self) -> List[str]:
        return list(self.routes)

    def enabled_modules(self) -> List[str]:
        return [m.module_name for m in self.modules if m.module_check()]

    def dispatch(self, command: str, scenario: Scenario, args: Namespace) -> CommandResult:
        """Run a command; disabled modules refuse with the error exit code"""
        module, handler = self.routes[command]
        if not module.module_check():
            logger.error(f"❌ Command {command} belongs to the disabled {module.module_name} module")
            return CommandResult(exit_code=EXIT_ERROR,
                                 text=f"❌ {command} is disabled (SYNCSHAPE_ENABLE_{module.module_name.upper()})\n")

        started = time.perf_counter()
        result = handler(scenario, args)
        log_command(command, {"scenario": scenario.name, "run": args.run, "env_index": args.env_index,
                              "seed": args.seed, "count": args.count},
                    time.perf_counter() - started, result.exit_code)
        return result
