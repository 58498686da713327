from pathlib import Path
from typing import Optional, Tuple

import click

from swarmnet.config import settings
from swarmnet.commands.output import U64_MAX, finish_run, output_dir, write_text
from swarmnet.models.enums import PolicyEnum
from swarmnet.schemas.core import GeoPoint, Polygon
from swarmnet.schemas.mission import MissionDefaults
from swarmnet.schemas.planner import PlanOptions
from swarmnet.schemas.simengine import FleetSpec
from swarmnet.services import mission_service, planner_service, simengine_service
from swarmnet.utils.documents import content_hash

POLICIES = {"energy": PolicyEnum.energy_aware, "static": PolicyEnum.static}


@click.command("parse")
@click.argument("request")
@click.option(
    "--vertex",
    "vertices",
    type=(float, float),
    multiple=True,
    help="Perimeter vertex X Y in metres; repeatable. Defaults to the 200 m patrol square.",
)
@click.option("--mission-id", help="Mission id; derived from the request text when omitted.")
@click.option("--out", help="Write mission.yaml here instead of printing it.")
def parse(request: str, vertices: Tuple[Tuple[float, float], ...], mission_id: Optional[str], out: Optional[str]):
    """Turn a free-text inspection request into a mission document."""
    if vertices:
        perimeter = Polygon(vertices=[GeoPoint(x_m=x, y_m=y) for x, y in vertices])
    else:
        perimeter = simengine_service.default_scenario().mission.perimeter
    spec = mission_service.parse_request(request, MissionDefaults(mission_id=mission_id, perimeter=perimeter))
    document = mission_service.serialize(spec)
    if out is None:
        click.echo(document, nl=False)
        return
    out_dir = output_dir(out)
    outputs = [write_text(out_dir, "mission.yaml", document)]
    finish_run("parse", settings.SEED, content_hash(mission_service.mission_body(spec)), out_dir, outputs)


@click.command("plan")
@click.argument("mission", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--fleet", "fleet_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Fleet document.")
@click.option("--drones", type=click.IntRange(min=1), help="Size of a random fleet drawn from --seed.")
@click.option("--seed", type=click.IntRange(0, U64_MAX), envvar="SWARMNET_SEED")
@click.option("--policy", type=click.Choice(sorted(POLICIES)), default="energy", show_default=True)
@click.option("--spacing", type=click.FloatRange(min=0, min_open=True), default=10.0, show_default=True, help="Sweep spacing (m).")
@click.option("--out", help="Write plan.yaml here instead of printing it.")
def plan(
    mission: Path,
    fleet_path: Optional[Path],
    drones: Optional[int],
    seed: Optional[int],
    policy: str,
    spacing: float,
    out: Optional[str],
):
    """Assign roles and sweep lines to a fleet for a mission document."""
    if fleet_path is not None and drones is not None:
        raise click.UsageError("--fleet and --drones are mutually exclusive")
    seed = settings.SEED if seed is None else seed
    spec = mission_service.deserialize(mission.read_text(encoding="utf-8"))
    if fleet_path is not None:
        fleet = planner_service.deserialize_fleet(fleet_path.read_text(encoding="utf-8"))
        fleet_drones, stations = list(fleet.drones), list(fleet.stations)
    else:
        fleet_spec = FleetSpec() if drones is None else FleetSpec(size=drones)
        fleet_drones, stations = simengine_service.fleet_for_seed(fleet_spec, seed), []

    result = planner_service.assign_roles(fleet_drones, spec, POLICIES[policy], stations, PlanOptions(spacing_m=spacing))
    document = planner_service.serialize_plan(result)
    if out is None:
        click.echo(document, nl=False)
        return
    out_dir = output_dir(out)
    outputs = [write_text(out_dir, "plan.yaml", document)]
    digest = content_hash(
        {
            "mission": mission_service.mission_body(spec),
            "drones": [d.model_dump(mode="json") for d in fleet_drones],
            "stations": [s.model_dump(mode="json") for s in stations],
            "policy": POLICIES[policy].value,
            "spacing_m": spacing,
        }
    )
    finish_run("plan", seed, digest, out_dir, outputs)
