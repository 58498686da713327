import logging
from pathlib import Path
from typing import List, Optional

import click

from swarmnet.config import settings
from swarmnet.database import ledger_enabled
from swarmnet.dependencies import get_db
from swarmnet.schemas.scenario import RunManifest
from swarmnet.services import run_service, scenario_service

logger = logging.getLogger(__name__)

U64_MAX = (1 << 64) - 1


def output_dir(out: Optional[str]) -> Path:
    path = Path(out or settings.OUT)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_text(out_dir: Path, name: str, text: str) -> str:
    (out_dir / name).write_text(text, encoding="utf-8", newline="")
    return name


def seed_series(seed: int, count: int) -> List[int]:
    return [(seed + k) & U64_MAX for k in range(count)]


def finish_run(command: str, seed: int, digest: str, out_dir: Path, outputs: List[str]) -> RunManifest:
    """Write the manifest, record the run in the ledger if one is configured, and report the files."""
    run = scenario_service.manifest(command, seed, digest, outputs)
    scenario_service.write_manifest(out_dir, run)
    if ledger_enabled():
        for db in get_db():
            record = run_service.record_run(db, run, output_dir=str(out_dir))
            logger.info("recorded run %d in the ledger", record.id)
    for name in run.outputs + [scenario_service.MANIFEST_FILE]:
        click.echo(str(out_dir / name))
    return run
