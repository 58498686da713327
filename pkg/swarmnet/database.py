# swarmnet/database.py
from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, sessionmaker

from swarmnet.config import settings

# Base class for all ORM models
Base = declarative_base()

# Session factory, bound once the ledger is enabled
SessionLocal = sessionmaker(autocommit=False, autoflush=False)

_engine: Optional[Engine] = None


def ledger_enabled() -> bool:
    return _engine is not None or bool(settings.DATABASE_URL)


def init_engine(url: Optional[str] = None) -> Engine:
    """Bind the session factory to ``url`` (default: SWARMNET_DATABASE_URL) and create the tables."""
    global _engine
    url = url or settings.DATABASE_URL
    if not url:
        raise RuntimeError("run ledger is disabled: SWARMNET_DATABASE_URL is not set")
    from swarmnet.models import run_models  # noqa: F401  registers the tables on Base

    _engine = create_engine(url)
    SessionLocal.configure(bind=_engine)
    Base.metadata.create_all(bind=_engine)
    return _engine


def get_engine() -> Engine:
    return _engine if _engine is not None else init_engine()
