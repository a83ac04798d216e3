"""
Theorem Commands - commands/theorems.py
check-theorems: run the scenario's acceptance suites and print pass counts
"""

import logging
from argparse import Namespace
from typing import Dict

from commands.base import EXIT_VIOLATIONS, CommandModule, CommandResult, Handler
from core.acceptance import pass_count_table, run_suites
from core.errors import ScenarioError
from utils.reports import ReportBuilder
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)

MAX_LISTED_VIOLATIONS = 10


class TheoremCommands(CommandModule):
    """Acceptance suites"""

    module_name = "theorems"

    def commands(self) -> Dict[str, Handler]:
        return {"check-theorems": self.check_theorems}

    def check_theorems(self, scenario: Scenario, args: Namespace) -> CommandResult:
        if not scenario.theorems:
            raise ScenarioError(f"{scenario.name} lists no suites under analysis.theorems")
        results = run_suites(scenario)
        passed = all(r.passed for r in results)

        builder = ReportBuilder.success if passed else ReportBuilder.error
        report = builder(f"Theorem suites for {scenario.name}")
        report.add_section("pass counts", pass_count_table(results).splitlines())
        for suite in results:
            if suite.notes:
                report.add_section(f"{suite.name} notes", suite.notes)
            if suite.violations:
                report.add_section(f"{suite.name} violations",
                                   [str(v) for v in suite.violations[:MAX_LISTED_VIOLATIONS]])

        result = CommandResult(text=report.render(), exit_code=0 if passed else EXIT_VIOLATIONS)
        path = self.write_artifact(args, scenario, "theorems.txt", result.text)
        if path:
            result.artifacts.append(path)
        return result
