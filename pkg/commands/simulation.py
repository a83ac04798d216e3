"""
Simulation Commands - commands/simulation.py
simulate: one run by canonical index or seed; enumerate: exhaustive bundle size
"""

import logging
from argparse import Namespace
from typing import Dict

from commands.base import CommandModule, CommandResult, Handler
from core.simulator import estimate_environment_count, run_log, sample_system
from utils.dot_export import run_to_dot
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)


class SimulationCommands(CommandModule):
    """Run generation commands"""

    module_name = "simulation"

    def commands(self) -> Dict[str, Handler]:
        return {"simulate": self.simulate, "enumerate": self.enumerate}

    def simulate(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """One run: the --env-index-th of the exhaustive bundle, else a seeded draw"""
        if args.env_index is not None:
            run = self.pick_run(scenario.bundle(), args)
            logger.info(f"🏃 Selected run {args.env_index} of {scenario.name}")
        else:
            seed = self.seed(args)
            run = sample_system(scenario.protocol(), scenario.context, seed, 1)[0]
            logger.info(f"🎲 Drew one run of {scenario.name} with seed {seed}")

        result = CommandResult()
        if args.format == "dot":
            result.text = run_to_dot(run)
            suffix = "run.dot"
        else:
            result.text = run_log(run)
            suffix = "run.log"
        path = self.write_artifact(args, scenario, suffix, result.text)
        if path:
            result.artifacts.append(path)
        return result

    def enumerate(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """Build the exhaustive bundle and print its size"""
        estimate = estimate_environment_count(scenario.context)
        logger.info(f"📦 Enumerating {scenario.name}; at most {estimate} environment choices")
        bundle = scenario.bundle()
        return CommandResult(text=f"{len(bundle)}\n")
