from .core import (
    FIVE_G,
    SIX_G,
    GeoPoint,
    NetworkProfile,
    Polygon,
    SwarmConfig,
)
from .mission import MissionConstraints, MissionSpec
