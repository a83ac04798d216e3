"""
Export Commands - commands/export.py
dot: DOT documents for a run, a structure witness or the condensed ordering
"""

import logging
from argparse import Namespace
from typing import Dict

from commands.base import CommandModule, CommandResult, Handler
from core.causality import build_causal_graph
from core.coordination import scc_decompose
from core.errors import CoordinationError, StructureQueryError
from utils.dot_export import cro_to_dot, run_to_dot, witness_to_dot
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)


class ExportCommands(CommandModule):
    """Graph export"""

    module_name = "export"

    def commands(self) -> Dict[str, Handler]:
        return {"dot": self.dot}

    def dot(self, scenario: Scenario, args: Namespace) -> CommandResult:
        kind = args.object or "run"
        if kind == "cro":
            if scenario.ordering is None:
                raise CoordinationError(f"{scenario.name} declares no response ordering")
            text = cro_to_dot(scc_decompose(scenario.ordering), scenario.network)
        elif kind == "witness":
            if not scenario.structures:
                raise StructureQueryError(f"{scenario.name} declares no structure queries")
            query = scenario.structures[0]
            index = args.run if args.run is not None else query.run
            run = self.pick_run(self.bundle(scenario, args), Namespace(run=index))
            witness = query.search(build_causal_graph(run), scenario.network)
            if witness is None:
                raise StructureQueryError(f"no witness for {query.describe(scenario.network)}")
            text = witness_to_dot(witness, scenario.network)
        else:
            text = run_to_dot(self.pick_run(self.bundle(scenario, args), args))

        logger.info(f"🖼️ Exported {kind} of {scenario.name} as DOT")
        result = CommandResult(text=text)
        path = self.write_artifact(args, scenario, f"{kind}.dot", text)
        if path:
            result.artifacts.append(path)
        return result
