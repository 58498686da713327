from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Integer, String, Text

from swarmnet.database import Base


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String, nullable=False, index=True)
    seed = Column(String, nullable=False)  # u64 does not fit a signed BIGINT
    config_hash = Column(String(16), nullable=False, index=True)
    artifact_version = Column(String, nullable=False)
    output_dir = Column(String, nullable=True)
    outputs = Column(Text, nullable=True)
    created_at = Column(DateTime(timezone=True), nullable=False, default=_utcnow)
