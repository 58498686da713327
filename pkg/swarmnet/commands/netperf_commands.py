import logging
from typing import Optional, Tuple

import click

from swarmnet.config import settings
from swarmnet.commands.output import U64_MAX, finish_run, output_dir, seed_series, write_text
from swarmnet.models.enums import ModeEnum, TransmissionModeEnum
from swarmnet.schemas.netperf import TABLE1_COLUMNS
from swarmnet.schemas.semcomm import BANDWIDTH_COLUMNS, SemanticConfig
from swarmnet.services import netperf_service, report_service, semcomm_service
from swarmnet.utils.delimited import to_csv
from swarmnet.utils.documents import content_hash

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = [
    "drones",
    "network",
    "cr_mean",
    "published_cr_mean",
    "cr_rel_deviation",
    "cr_within_tolerance",
    "dt_mean",
    "published_dt_mean",
    "dt_abs_deviation",
    "dt_within_tolerance",
]


@click.command("table1")
@click.option("--seed", type=click.IntRange(0, U64_MAX), envvar="SWARMNET_SEED", help="Master seed.")
@click.option("--iterations", type=click.IntRange(min=2), default=netperf_service.TABLE1_ITERATIONS, show_default=True)
@click.option("--out", envvar="SWARMNET_OUT", help="Output directory.")
@click.option(
    "--mode",
    type=click.Choice([m.value for m in ModeEnum]),
    default=ModeEnum.table_calibrated.value,
    show_default=True,
)
@click.option("--workers", type=click.IntRange(min=1), envvar="SWARMNET_WORKERS")
@click.option("--seeds-average", type=click.IntRange(min=1), help="Average the statistics over this many seeds.")
@click.option("--compare-published", is_flag=True, help="Also write deviations from the published table.")
def table1(
    seed: Optional[int],
    iterations: int,
    out: Optional[str],
    mode: str,
    workers: Optional[int],
    seeds_average: Optional[int],
    compare_published: bool,
):
    """Collision rate and fault-detection time for 10-50 drones on 5G and 6G."""
    seed = settings.SEED if seed is None else seed
    workers = workers or settings.WORKERS
    mode = ModeEnum(mode)
    if seeds_average is not None and mode != ModeEnum.table_calibrated:
        raise click.UsageError("--seeds-average only applies to the TableCalibrated mode")
    out_dir = output_dir(out)

    if seeds_average is not None:
        rows = netperf_service.seed_averaged_table1(seed_series(seed, seeds_average), iterations=iterations, workers=workers)
    else:
        rows = netperf_service.table1_report(seed, iterations=iterations, mode=mode, workers=workers)

    outputs = [
        write_text(out_dir, "table1.csv", to_csv(TABLE1_COLUMNS, [r.as_record() for r in rows])),
        write_text(out_dir, "table1.md", report_service.render_table(report_service.table1_table(rows))),
    ]
    if compare_published:
        comparisons = netperf_service.compare_with_published(rows)
        records = [c.model_dump(mode="json") for c in comparisons]
        outputs.append(write_text(out_dir, "table1_published.csv", to_csv(COMPARISON_COLUMNS, records)))
        misses = [c for c in comparisons if not (c.cr_within_tolerance and c.dt_within_tolerance)]
        if misses:
            logger.warning("%d of %d rows fall outside the published tolerances", len(misses), len(comparisons))

    digest = content_hash(
        {
            "command": "table1",
            "iterations": iterations,
            "mode": mode.value,
            "seeds_average": seeds_average,
            "compare_published": compare_published,
        }
    )
    finish_run("table1", seed, digest, out_dir, outputs)


@click.command("bandwidth")
@click.option(
    "--profile",
    "profiles",
    multiple=True,
    help="Video profile, by name (1080p30) or as WIDTHxHEIGHT@FPS; repeatable. Defaults to the built-in suite.",
)
@click.option("--message-bytes", type=click.IntRange(min=1), default=2048, show_default=True)
@click.option("--messages-per-frame", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
@click.option("--seed", type=click.IntRange(0, U64_MAX), envvar="SWARMNET_SEED")
@click.option("--out", envvar="SWARMNET_OUT", help="Output directory.")
def bandwidth(
    profiles: Tuple[str, ...],
    message_bytes: int,
    messages_per_frame: float,
    seed: Optional[int],
    out: Optional[str],
):
    """Raw video versus semantic message bandwidth per video profile."""
    seed = settings.SEED if seed is None else seed
    chosen = [semcomm_service.parse_profile(p) for p in profiles] or None
    config = SemanticConfig(message_size_bytes=message_bytes, messages_per_frame=messages_per_frame)
    out_dir = output_dir(out)

    rows = semcomm_service.bandwidth_table(chosen, config)
    short = sorted({r.profile for r in rows if r.mode == TransmissionModeEnum.semantic and not r.meets_claim})
    notes = [f"semantic reduction below {semcomm_service.CLAIMED_REDUCTION:.0%} for {', '.join(short)}"] if short else []
    outputs = [
        write_text(out_dir, "bandwidth.csv", to_csv(BANDWIDTH_COLUMNS, [r.as_record() for r in rows])),
        write_text(out_dir, "bandwidth.md", report_service.render_table(report_service.bandwidth_table(rows), notes)),
    ]
    digest = content_hash(
        {
            "command": "bandwidth",
            "profiles": [p.model_dump(mode="json") for p in chosen or semcomm_service.DEFAULT_PROFILES],
            "semantic": config.model_dump(mode="json"),
        }
    )
    finish_run("bandwidth", seed, digest, out_dir, outputs)
