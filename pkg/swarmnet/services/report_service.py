"""Inspection reports rendered from simulation outcomes.

Markdown goes through a Mako template; the structured form is a ``report``
document that any document reader can load back. The narrative paragraph comes
from a ``TextGenerator`` callable, template text by default.
"""
import logging
import math
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from mako.lookup import TemplateLookup

from swarmnet import __version__
from swarmnet.models.enums import MessageStatusEnum, ReportFormatEnum, SensorEnum
from swarmnet.schemas.mission import MissionSpec
from swarmnet.schemas.netperf import TABLE1_COLUMNS, Table1Row
from swarmnet.schemas.report import (
    CoverageSummary,
    EnergyRow,
    EnergySummary,
    FaultRow,
    MissionSummary,
    NetworkTable,
    Provenance,
    ReportBundle,
)
from swarmnet.schemas.semcomm import BANDWIDTH_COLUMNS, BandwidthRow
from swarmnet.schemas.simengine import SimOutcome
from swarmnet.services import mission_service
from swarmnet.utils.documents import dump_document, load_model
from swarmnet.utils.errors import DocumentError
from swarmnet.utils.geometry import area_m2

logger = logging.getLogger(__name__)

TextGenerator = Callable[[ReportBundle], str]

REPORT_SCHEMA_VERSION = 1
_TEMPLATES = TemplateLookup(
    directories=[str(Path(__file__).resolve().parent.parent / "templates")],
    strict_undefined=True,
    input_encoding="utf-8",
)

_FAULT_TYPES = {
    "RoadInspection": "road surface defect",
    "BuildingInspection": "structural defect",
    "BridgeInspection": "structural defect",
    "PowerLineInspection": "line fault",
    "FireHydrantInspection": "hydrant fault",
    "ConstructionMonitoring": "site anomaly",
}


def _network_table(title: str, columns: Sequence[str], records: Sequence[dict]) -> NetworkTable:
    return NetworkTable(title=title, columns=list(columns), rows=[[r[c] for c in columns] for r in records])


def table1_table(rows: Sequence[Table1Row]) -> NetworkTable:
    return _network_table("Network performance", TABLE1_COLUMNS, [r.as_record() for r in rows])


def bandwidth_table(rows: Sequence[BandwidthRow]) -> NetworkTable:
    return NetworkTable(title="Bandwidth", columns=list(BANDWIDTH_COLUMNS), rows=[r.as_record() for r in rows])


def build_bundle(
    outcome: SimOutcome,
    spec: MissionSpec,
    config_hash: str,
    network_rows: Optional[Sequence[Table1Row]] = None,
    bandwidth_rows: Optional[Sequence[BandwidthRow]] = None,
) -> ReportBundle:
    fault_type = _FAULT_TYPES[spec.mission_type.value]
    if SensorEnum.thermal in spec.sensors:
        fault_type += " (thermal)"
    faults = [
        FaultRow(
            fault_id=f.fault_id,
            x_m=f.position.x_m,
            y_m=f.position.y_m,
            fault_type=fault_type,
            detection_latency_ms=f.latency_ms,
            detected_by=f.detected_by,
        )
        for f in outcome.faults
        if f.detected
    ]
    ledgers = [d.ledger for d in outcome.drones]
    energy = EnergySummary(
        total_j=outcome.total_energy_j,
        cruise_j=math.fsum(l.cruise_j for l in ledgers),
        hover_j=math.fsum(l.hover_j for l in ledgers),
        compute_j=math.fsum(l.compute_j for l in ledgers),
        tx_j=math.fsum(l.tx_j for l in ledgers),
        tx_share=outcome.tx_energy_share,
        reference_comm_share=outcome.reference_comm_share,
        drones=[
            EnergyRow(
                drone_id=d.drone_id,
                initial_role=d.initial_role,
                final_role=d.final_role,
                consumed_j=d.ledger.total_j,
                recharged_j=d.recharged_j,
                final_energy_j=d.final_energy_j,
            )
            for d in outcome.drones
        ],
    )
    tables = []
    if network_rows:
        tables.append(table1_table(network_rows))
    if bandwidth_rows:
        tables.append(bandwidth_table(bandwidth_rows))
    return ReportBundle(
        mission=MissionSummary(
            mission_id=spec.mission_id,
            mission_type=spec.mission_type,
            objectives=list(spec.objectives),
            sensors=sorted(spec.sensors, key=list(SensorEnum).index),
            perimeter_area_m2=area_m2(spec.perimeter),
            max_duration_min=spec.constraints.max_duration_min,
            min_battery_reserve_pct=spec.constraints.min_battery_reserve_pct,
        ),
        faults=faults,
        coverage=CoverageSummary(
            coverage_fraction=outcome.coverage_fraction,
            operational_time_ms=outcome.operational_time_ms,
            end_reason=outcome.end_reason,
            faults_injected=outcome.faults_injected,
            faults_detected=outcome.faults_detected,
            messages_sent=len(outcome.messages),
            messages_lost=sum(1 for m in outcome.messages if m.status == MessageStatusEnum.lost),
        ),
        energy=energy,
        network_tables=tables,
        provenance=Provenance(
            seed=outcome.seed,
            config_hash=config_hash,
            artifact_version=__version__,
            policy=outcome.policy,
            network=outcome.network,
            transmission_mode=outcome.transmission_mode,
        ),
        warnings=list(outcome.warnings),
    )


def template_narrative(bundle: ReportBundle) -> str:
    coverage = bundle.coverage
    detected = coverage.faults_detected
    return (
        f"The {bundle.mission.mission_type.value} mission {bundle.mission.mission_id} ran for "
        f"{coverage.operational_time_ms / 1000.0:.1f} s and ended with {coverage.end_reason.value}. "
        f"The swarm covered {100.0 * coverage.coverage_fraction:.1f}% of the planned sweep and reported "
        f"{detected} of {coverage.faults_injected} injected faults."
    )


def _cell(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _exact(value: Any) -> str:
    """Shortest text that reads back as the same float."""
    if isinstance(value, float):
        return repr(value)
    return _cell(value)


def render(
    bundle: ReportBundle,
    fmt: ReportFormatEnum = ReportFormatEnum.markdown,
    text_generator: Optional[TextGenerator] = None,
) -> str:
    narrative = bundle.narrative
    if narrative is None:
        narrative = (text_generator or template_narrative)(bundle)
    bundle = bundle.model_copy(update={"narrative": narrative})
    if fmt == ReportFormatEnum.structured_document:
        return dump_document("report", bundle.model_dump(mode="json"), REPORT_SCHEMA_VERSION)
    template = _TEMPLATES.get_template("report.md.mako")
    logger.debug("rendering markdown report for %s", bundle.mission.mission_id)
    return template.render(bundle=bundle, cell=_cell, exact=_exact)


def read_report(text: str) -> ReportBundle:
    document = mission_service.read_any(text)
    if document.kind != "report":
        raise DocumentError(f"expected a 'report' document, got '{document.kind}'", field="schema", line=1)
    return load_model(document, ReportBundle)


def render_table(table: NetworkTable, notes: Sequence[str] = ()) -> str:
    """Standalone Markdown table, as written next to the delimited result files."""
    return _TEMPLATES.get_template("table.md.mako").render(table=table, cell=_cell, notes=list(notes))
