from typing import Optional

import click

from swarmnet.commands.errors import EXIT_INVALID, CommandFailure
from swarmnet.database import ledger_enabled
from swarmnet.dependencies import get_db
from swarmnet.services import run_service


@click.command("runs")
@click.option("--command", "command_name", help="Only runs of this subcommand.")
@click.option("--limit", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--offset", type=click.IntRange(min=0), default=0, show_default=True)
def runs(command_name: Optional[str], limit: int, offset: int):
    """List recorded runs, newest first."""
    if not ledger_enabled():
        raise CommandFailure("run ledger is disabled; set SWARMNET_DATABASE_URL", EXIT_INVALID)
    for db in get_db():
        for record in run_service.list_runs(db, command=command_name, limit=limit, offset=offset):
            created = record.created_at.isoformat(timespec="seconds") if record.created_at else ""
            click.echo(
                "\t".join(
                    [
                        str(record.id),
                        record.command,
                        record.seed,
                        record.config_hash,
                        record.artifact_version,
                        created,
                        record.output_dir or "",
                    ]
                )
            )
