"""
Protocol Commands - commands/protocols.py
snapshot: one episode against the earliest-broom oracle; gor: ordered
response checks over the scenario's bundle
"""

import logging
from argparse import Namespace
from typing import Dict, List

from commands.base import EXIT_VIOLATIONS, CommandModule, CommandResult, Handler
from core.coordination import CheckReport, check_gor, check_ojr, check_required_structures
from core.errors import CoordinationError, SnapshotError
from core.network import NEVER
from core.simulator import DelayFallback, EnvironmentChoice, sample_system
from core.snapshot import flooding_initiations, oracle_earliest_broom, run_snapshot_scenario, snapshot_report
from utils.analysis_logger import log_violation
from utils.dot_export import run_to_dot
from utils.reports import ReportBuilder
from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)

MAX_LISTED_VIOLATIONS = 25


class ProtocolCommands(CommandModule):
    """Snapshot and ordered-response protocol runs"""

    module_name = "protocols"

    def commands(self) -> Dict[str, Handler]:
        return {"snapshot": self.snapshot, "gor": self.gor}

    # ==================== SNAPSHOT ====================

    def _snapshot_environment(self, scenario: Scenario, args: Namespace) -> EnvironmentChoice:
        """--env-index, else --seed, else every trigger present with slowest delivery"""
        if args.env_index is not None:
            return self.pick_run(scenario.bundle(), args).environment
        if args.seed is not None:
            return sample_system(scenario.protocol(), scenario.context, args.seed, 1)[0].environment
        return EnvironmentChoice.of(scenario.context.slot_ids, fallback=DelayFallback.MAX_BOUND)

    def snapshot(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """Run one episode and compare its recording time with the earliest broom"""
        if scenario.protocol_kind != "snapshot":
            raise SnapshotError(f"{scenario.name} does not select the snapshot protocol")
        env = self._snapshot_environment(scenario, args)
        episode = run_snapshot_scenario(scenario.context, env)
        earliest = oracle_earliest_broom(scenario.context, env)
        floods = flooding_initiations(episode.run)

        optimal = earliest is not NEVER and episode.time == earliest
        builder = ReportBuilder.success if optimal else ReportBuilder.error
        report = builder(f"Snapshot of {scenario.name}", env.encode())
        report.add_field("recording time", episode.time)
        report.add_field("earliest broom", earliest)
        report.add_field("messages in transit", episode.in_transit_count)
        report.add_field("floodings", ", ".join(
            f"{scenario.network.agent_label(i)}={n}" for i, n in sorted(floods.items())))
        report.add_section("cut", snapshot_report(episode, scenario.network).splitlines())

        result = CommandResult(text=report.render())
        if not optimal:
            log_violation("snapshot", f"recorded at {episode.time}, earliest broom at {earliest}")
            result.exit_code = EXIT_VIOLATIONS
        if args.format == "dot":
            path = self.write_artifact(args, scenario, "snapshot.dot", run_to_dot(episode.run, episode.time))
            if path:
                result.artifacts.append(path)
        return result

    # ==================== ORDERED RESPONSE ====================

    def gor(self, scenario: Scenario, args: Namespace) -> CommandResult:
        """Check the scenario's protocol bundle against its response ordering"""
        if scenario.ordering is None:
            raise CoordinationError(f"{scenario.name} declares no response ordering")
        bundle = self.bundle(scenario, args)
        reports: List[CheckReport] = [check_gor(bundle, scenario.ordering)]
        if scenario.ojr is not None:
            reports.append(check_ojr(bundle, scenario.ojr))
        reports.append(check_required_structures(bundle, scenario.ordering))

        passed = all(r.passed for r in reports)
        builder = ReportBuilder.success if passed else ReportBuilder.error
        report = builder(f"Ordered response checks for {scenario.name}",
                         f"protocol {bundle.protocol_id}, {len(bundle)} runs")
        for check in reports:
            report.add_field(check.name, check.summary())
            for violation in check.violations:
                log_violation(check.name, str(violation))
            listed = [str(v) for v in check.violations[:MAX_LISTED_VIOLATIONS]]
            if len(check.violations) > MAX_LISTED_VIOLATIONS:
                listed.append(f"... {len(check.violations) - MAX_LISTED_VIOLATIONS} more")
            if listed:
                report.add_section(f"{check.name} violations", listed)

        result = CommandResult(text=report.render())
        if not passed:
            result.exit_code = EXIT_VIOLATIONS
        path = self.write_artifact(args, scenario, "gor.txt", result.text)
        if path:
            result.artifacts.append(path)
        return result
