import logging
from pathlib import Path
from typing import Optional

import click

from swarmnet.config import settings
from swarmnet.commands.output import U64_MAX, finish_run, output_dir, seed_series, write_text
from swarmnet.models.enums import NetworkEnum, PolicyEnum, ReportFormatEnum, TransmissionModeEnum
from swarmnet.schemas.report import NetworkTable
from swarmnet.schemas.scenario import ScenarioConfig
from swarmnet.schemas.simengine import MESSAGE_LOG_COLUMNS, MissionScenario
from swarmnet.services import report_service, scenario_service, simengine_service
from swarmnet.utils.delimited import to_csv
from swarmnet.utils.errors import InvalidScenario

logger = logging.getLogger(__name__)

NETWORKS = {"5g": NetworkEnum.five_g, "6g": NetworkEnum.six_g}
POLICIES = {"energy": PolicyEnum.energy_aware, "static": PolicyEnum.static}
MODES = {"semantic": TransmissionModeEnum.semantic, "raw": TransmissionModeEnum.raw}

PAIR_COLUMNS = ["seed", "baseline_time_ms", "candidate_time_ms", "delta_ms", "baseline_end", "candidate_end"]
MODE_COLUMNS = ["seed", "semantic_tx_share", "raw_tx_share", "semantic_tx_j", "raw_tx_j"]

scenario_argument = click.argument(
    "scenario", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)


def scenario_options(fn):
    """Flags shared by every command that runs the mission simulation."""
    for option in reversed(
        [
            click.option("--seed", type=click.IntRange(0, U64_MAX), envvar="SWARMNET_SEED", help="Master seed."),
            click.option("--out", envvar="SWARMNET_OUT", help="Output directory."),
            click.option("--network", type=click.Choice(sorted(NETWORKS)), help="Network generation."),
            click.option("--drones", type=click.IntRange(min=1), help="Fleet size."),
            click.option("--policy", type=click.Choice(sorted(POLICIES)), help="Task allocation policy."),
            click.option("--mode", type=click.Choice(sorted(MODES)), help="Transmission mode."),
            click.option("--workers", type=click.IntRange(min=1), envvar="SWARMNET_WORKERS"),
        ]
    ):
        fn = option(fn)
    return fn


def _resolve(scenario: Optional[Path], **flags) -> ScenarioConfig:
    config = scenario_service.load_scenario(scenario) if scenario else scenario_service.default_config()
    for name, table in (("network", NETWORKS), ("policy", POLICIES), ("mode", MODES)):
        if flags.get(name) is not None:
            flags[name] = table[flags[name]]
    config = scenario_service.apply_overrides(config, **flags)
    return scenario_service.apply_overrides(
        config,
        seed=scenario_service.resolved_seed(config, settings.SEED),
        out=config.out or settings.OUT,
        workers=scenario_service.resolved_workers(config, settings.WORKERS),
    )


@click.command("simulate")
@scenario_argument
@scenario_options
def simulate(scenario: Optional[Path], **flags):
    """Run one mission and write its outcome, message log and report."""
    config = _resolve(scenario, **flags)
    spec = scenario_service.resolve_mission(config)
    drones, simulation = scenario_service.resolve_fleet(config, config.seed)
    digest = scenario_service.config_hash(config)
    out_dir = output_dir(config.out)

    outcome = simengine_service.run_mission(spec, drones, simulation, config.seed)
    bundle = report_service.build_bundle(outcome, spec, digest)
    outputs = [
        write_text(out_dir, "outcome.yaml", simengine_service.serialize_outcome(outcome)),
        write_text(out_dir, "messages.csv", to_csv(MESSAGE_LOG_COLUMNS, [m.as_record() for m in outcome.messages])),
        write_text(out_dir, "report.md", report_service.render(bundle)),
        write_text(out_dir, "report.yaml", report_service.render(bundle, ReportFormatEnum.structured_document)),
    ]
    logger.info(
        "%s ended with %s after %.1f s, coverage %.3f",
        outcome.mission_id,
        outcome.end_reason.value,
        outcome.operational_time_ms / 1000.0,
        outcome.coverage_fraction,
    )
    finish_run("simulate", config.seed, digest, out_dir, outputs)


@click.command("compare")
@scenario_argument
@scenario_options
@click.option("--seeds", type=click.IntRange(min=simengine_service.MIN_COMPARISON_SEEDS), help="Number of paired seeds.")
@click.option("--modes", is_flag=True, help="Also compare semantic and raw transmit energy.")
def compare(scenario: Optional[Path], seeds: Optional[int], modes: bool, **flags):
    """Paired EnergyAware versus Static operational time over consecutive seeds."""
    config = _resolve(scenario, seeds=seeds, **flags)
    if config.fleet_path is not None:
        raise InvalidScenario("compare draws a fresh fleet per seed from 'fleet'; remove 'fleet_path'")
    mission = MissionScenario(
        mission=scenario_service.resolve_mission(config),
        simulation=config.simulation,
        fleet=config.fleet,
    )
    series = seed_series(config.seed, config.seeds)
    digest = scenario_service.config_hash(config)
    out_dir = output_dir(config.out)

    result = simengine_service.compare_policies(mission, series, workers=config.workers)
    records = [p.model_dump(mode="json") for p in result.pairs]
    table = NetworkTable(
        title=f"{result.candidate.value} versus {result.baseline.value}",
        columns=PAIR_COLUMNS,
        rows=[[r[c] for c in PAIR_COLUMNS] for r in records],
    )
    notes = [
        f"mean delta {result.mean_delta_ms / 1000.0:.1f} s",
        f"{result.wins} wins, {result.losses} losses, {result.ties} ties",
        f"one-sided sign test p = {result.p_value:.4g}",
    ]
    outputs = [
        write_text(out_dir, "policy_comparison.csv", to_csv(PAIR_COLUMNS, records)),
        write_text(out_dir, "policy_comparison.md", report_service.render_table(table, notes)),
    ]
    if modes:
        rows = simengine_service.compare_modes(mission, series, workers=config.workers)
        outputs.append(write_text(out_dir, "mode_comparison.csv", to_csv(MODE_COLUMNS, [r.model_dump() for r in rows])))
    finish_run("compare", config.seed, digest, out_dir, outputs)
