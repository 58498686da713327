"""Scenario files, overrides and the run manifest.

Precedence for every setting is command-line flag, then environment, then the
scenario file, then model defaults. The command layer folds flags and
environment together (click reads the ``SWARMNET_*`` variables) before calling
``apply_overrides``.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple

from swarmnet import __version__
from swarmnet.schemas.mission import MissionDefaults, MissionSpec
from swarmnet.schemas.planner import DroneState
from swarmnet.schemas.scenario import RunManifest, ScenarioConfig
from swarmnet.schemas.simengine import SimScenario
from swarmnet.services import mission_service, planner_service, simengine_service
from swarmnet.utils.documents import content_hash, dump_document, load_model, locate, read_document
from swarmnet.utils.errors import DocumentError

logger = logging.getLogger(__name__)

SCENARIO_SCHEMA_VERSION = 1
MANIFEST_FILE = "run_manifest.yaml"


def load_scenario(path: Path) -> ScenarioConfig:
    """Read a scenario document; referenced files are resolved next to it and must exist."""
    document = read_document(path.read_text(encoding="utf-8"), expected_kind="scenario", max_version=SCENARIO_SCHEMA_VERSION)
    config = load_model(document, ScenarioConfig)
    resolved: Dict[str, str] = {}
    for name in ("mission_path", "fleet_path"):
        value = getattr(config, name)
        if value is None:
            continue
        target = (path.parent / value).resolve()
        if not target.is_file():
            raise DocumentError(
                f"referenced file '{value}' does not exist",
                field=name,
                line=locate(document.node, [document.kind, name]),
            )
        resolved[name] = str(target)
    return config.model_copy(update=resolved)


def default_config() -> ScenarioConfig:
    scenario = simengine_service.default_scenario()
    return ScenarioConfig(mission=scenario.mission, simulation=scenario.simulation, fleet=scenario.fleet)


def apply_overrides(config: ScenarioConfig, **overrides: Any) -> ScenarioConfig:
    """Merge non-None overrides and re-validate the whole config.

    Recognised keys: seed, out, network, drones, policy, mode, seeds, workers, iterations.
    """
    data = config.model_dump(mode="json", exclude_none=True)
    simulation = data.setdefault("simulation", {})
    fleet = data.setdefault("fleet", {})
    routes = {
        "network": (simulation, "network"),
        "policy": (simulation, "policy"),
        "mode": (simulation, "transmission_mode"),
        "drones": (fleet, "size"),
    }
    for key, value in overrides.items():
        if value is None:
            continue
        if key in routes:
            target, field = routes[key]
            target[field] = value.value if hasattr(value, "value") else value
        else:
            data[key] = value
    return ScenarioConfig.model_validate(data)


def config_hash(config: ScenarioConfig) -> str:
    """Identity of the inputs that shape results; output directory and worker count are not among them."""
    return content_hash(config.model_dump(mode="json", exclude={"out", "workers"}))


def resolve_mission(config: ScenarioConfig) -> MissionSpec:
    if config.mission is not None:
        return config.mission
    if config.mission_path is not None:
        return mission_service.deserialize(Path(config.mission_path).read_text(encoding="utf-8"))
    if config.request is not None:
        return mission_service.parse_request(config.request, MissionDefaults(perimeter=config.perimeter))
    return simengine_service.default_scenario().mission


def resolve_fleet(config: ScenarioConfig, seed: int) -> Tuple[List[DroneState], SimScenario]:
    """Drones for the run and the simulation settings with the fleet's charging stations applied."""
    if config.fleet_path is None:
        return simengine_service.fleet_for_seed(config.fleet, seed), config.simulation
    fleet = planner_service.deserialize_fleet(Path(config.fleet_path).read_text(encoding="utf-8"))
    simulation = config.simulation
    if fleet.stations:
        simulation = simulation.model_copy(update={"stations": list(fleet.stations)})
    return list(fleet.drones), simulation


def manifest(command: str, seed: int, digest: str, outputs: List[str]) -> RunManifest:
    return RunManifest(
        command=command,
        seed=seed,
        config_hash=digest,
        artifact_version=__version__,
        outputs=sorted(outputs),
    )


def write_manifest(out_dir: Path, run: RunManifest) -> Path:
    path = out_dir / MANIFEST_FILE
    path.write_text(dump_document("manifest", run.model_dump(mode="json")), encoding="utf-8")
    logger.info("wrote %s (config %s)", path, run.config_hash)
    return path


def serialize_scenario(config: ScenarioConfig) -> str:
    return dump_document("scenario", config.model_dump(mode="json", exclude_none=True), SCENARIO_SCHEMA_VERSION)


def read_manifest(text: str) -> RunManifest:
    return load_model(read_document(text, expected_kind="manifest", max_version=1), RunManifest)


def resolved_seed(config: ScenarioConfig, fallback: int) -> int:
    return config.seed if config.seed is not None else fallback


def resolved_workers(config: ScenarioConfig, fallback: int) -> int:
    return config.workers if config.workers is not None else fallback

