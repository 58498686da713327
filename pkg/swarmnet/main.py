import logging

import click

from swarmnet import __version__
from swarmnet.commands import mission_commands, netperf_commands, run_commands, sim_commands
from swarmnet.commands.errors import SwarmnetGroup
from swarmnet.config import settings

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@click.group(cls=SwarmnetGroup)
@click.version_option(__version__, prog_name="swarmnet")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=settings.LOG_LEVEL,
    show_default=True,
)
def cli(log_level: str):
    """Drone-swarm network, planning and mission simulator."""
    # stderr only; result files never carry log output
    logging.basicConfig(level=log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")


cli.add_command(netperf_commands.table1)
cli.add_command(netperf_commands.bandwidth)
cli.add_command(mission_commands.parse)
cli.add_command(mission_commands.plan)
cli.add_command(sim_commands.simulate)
cli.add_command(sim_commands.compare)
cli.add_command(run_commands.runs)
