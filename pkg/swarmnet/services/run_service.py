from typing import List, Optional

from sqlalchemy.orm import Session

from swarmnet.models.run_models import RunRecord
from swarmnet.schemas.scenario import RunManifest


def record_run(db: Session, manifest: RunManifest, output_dir: Optional[str] = None) -> RunRecord:
    record = RunRecord(
        command=manifest.command,
        seed=str(manifest.seed),
        config_hash=manifest.config_hash,
        artifact_version=manifest.artifact_version,
        output_dir=output_dir,
        outputs="\n".join(manifest.outputs),
    )
    db.add(record)
    db.commit()
    db.refresh(record)
    return record


def list_runs(db: Session, command: Optional[str] = None, limit: int = 20, offset: int = 0) -> List[RunRecord]:
    if limit < 1:
        raise ValueError("limit must be positive")
    query = db.query(RunRecord)
    if command:
        query = query.filter(RunRecord.command == command)
    return query.order_by(RunRecord.id.desc()).offset(offset).limit(limit).all()
