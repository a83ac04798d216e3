"""
Knowledge Commands - commands/knowledge.py
eval: formula truth tables over a bundle; structures: witness search on a run
"""

import logging
from argparse import Namespace
from typing import Dict, List, Tuple

from commands.base import CommandModule, CommandResult, Handler
from core.causality import build_causal_graph
from core.epistemics import Formula, ModelChecker, Point, parse_formula
from core.errors import StructureQueryError
from utils.dot_export import witness_to_dot
from utils.reports import ReportBuilder
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)


class KnowledgeCommands(CommandModule):
    """Epistemic and causal-structure queries"""

    module_name = "knowledge"

    def commands(self) -> Dict[str, Handler]:
        return {"eval": self.eval, "structures": self.structures}

    def _formulas(self, scenario: Scenario, args: Namespace) -> List[Tuple[str, Formula]]:
        if args.formula:
            return [(text, parse_formula(text, scenario.network.names)) for text in args.formula]
        return list(scenario.formulas)

    def eval(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """Truth of each formula at the requested points"""
        bundle = self.bundle(scenario, args)
        checker = ModelChecker(bundle, allow_sampled=self.config.ALLOW_SAMPLED_KNOWLEDGE)
        formulas = self._formulas(scenario, args)

        report = ReportBuilder.info(f"Knowledge in {scenario.name}")
        report.add_field("runs", len(bundle))
        report.add_field("evaluation horizon", checker.last_time)
        if not formulas:
            report.add_section("formulas", [])
            return CommandResult(text=report.render())

        for text, formula in formulas:
            if args.time is not None and args.run is not None:
                verdict = checker.evaluate(Point(args.run, args.time), formula)
                lines = [f"(run {args.run}, t={args.time}): {'true' if verdict else 'false'}"]
            elif args.time is not None:
                checker.check_point(Point(0, args.time))
                row = checker.table(formula)[args.time]
                lines = [f"run {r:>5}: {'true' if v else 'false'}" for r, v in enumerate(row)]
            else:
                table = checker.table(formula)
                runs = [args.run] if args.run is not None else range(checker.n_runs)
                for r in runs:
                    checker.check_point(Point(r, 0))
                lines = [f"{'t':>9}  " + "".join(str(t % 10) for t in range(checker.last_time + 1))]
                lines += [f"run {r:>5}: " + "".join("1" if v else "." for v in table[:, r]) for r in runs]
            report.add_section(text, lines)
        return CommandResult(text=report.render())

    def structures(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """Search each declared structure query; Absent when no witness exists"""
        if not scenario.structures:
            raise StructureQueryError(f"{scenario.name} declares no structure queries")
        bundle = self.bundle(scenario, args)
        net = scenario.network
        report = ReportBuilder.info(f"Structures in {scenario.name}")
        result = CommandResult()
        graphs = {}
        documents: List[str] = []

        for position, query in enumerate(scenario.structures):
            index = args.run if args.run is not None else query.run
            run = self.pick_run(bundle, Namespace(run=index))
            if index not in graphs:
                graphs[index] = build_causal_graph(run)
            witness = query.search(graphs[index], net)
            lines = [witness.describe(net)] if witness else ["Absent"]
            report.add_section(query.describe(net), lines)
            if witness and args.format == "dot":
                document = witness_to_dot(witness, net)
                path = self.write_artifact(args, scenario, f"witness_{position}.dot", document)
                if path:
                    result.artifacts.append(path)
                else:
                    documents.append(document)

        # Without --out the DOT documents follow the report on stdout
        result.text = report.render() + "".join(documents)
        return result
