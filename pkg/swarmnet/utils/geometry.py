"""Planar geometry helpers over the perimeter polygon (shapely backed)."""
from typing import Iterator, List, Tuple

from shapely.geometry import LineString, Point, box
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.base import BaseGeometry
from shapely.validation import explain_validity

from swarmnet.schemas.core import GeoPoint, Polygon
from swarmnet.utils.errors import InvalidPerimeter, ParameterError
from swarmnet.utils.rng import RngStream

_MAX_REJECTIONS = 100_000


def perimeter_problems(polygon: Polygon) -> List[str]:
    count = len(polygon.vertices)
    if count < 3:
        return [f"perimeter needs at least 3 vertices, got {count}"]
    shape = ShapelyPolygon(polygon.as_pairs())
    problems = []
    if not shape.is_valid:
        problems.append(f"perimeter is not a simple polygon ({explain_validity(shape)})")
    if shape.area <= 0:
        problems.append("perimeter has zero area")
    return problems


def check_perimeter(polygon: Polygon) -> ShapelyPolygon:
    problems = perimeter_problems(polygon)
    if problems:
        raise InvalidPerimeter("; ".join(problems))
    return ShapelyPolygon(polygon.as_pairs())


def area_m2(polygon: Polygon) -> float:
    return check_perimeter(polygon).area


def centroid(polygon: Polygon) -> GeoPoint:
    c = check_perimeter(polygon).centroid
    return GeoPoint(x_m=c.x, y_m=c.y)


def bounds(polygon: Polygon) -> Tuple[float, float, float, float]:
    return check_perimeter(polygon).bounds


def covers(polygon: Polygon, point: GeoPoint) -> bool:
    return check_perimeter(polygon).covers(Point(point.x_m, point.y_m))


def _areas(geometry: BaseGeometry) -> Iterator[ShapelyPolygon]:
    if isinstance(geometry, ShapelyPolygon):
        if not geometry.is_empty and geometry.area > 0:
            yield geometry
        return
    for part in getattr(geometry, "geoms", ()):
        yield from _areas(part)


def clip_row(shape: ShapelyPolygon, y: float, half_width: float = 0.0) -> List[Tuple[float, float]]:
    """Interior x-intervals of the row at ``y``, left to right.

    With ``half_width`` > 0 the row is the band ``[y - half_width, y + half_width]`` and each
    span is the x-extent of one part of the region inside it, overlapping spans merged.
    """
    minx, _, maxx, _ = shape.bounds
    if half_width > 0:
        band = box(minx - 1.0, y - half_width, maxx + 1.0, y + half_width)
        extents = sorted((part.bounds[0], part.bounds[2]) for part in _areas(shape.intersection(band)))
        merged: List[Tuple[float, float]] = []
        for x0, x1 in extents:
            if merged and x0 <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], x1))
            else:
                merged.append((x0, x1))
        return merged
    row = LineString([(minx - 1.0, y), (maxx + 1.0, y)])
    hit = shape.intersection(row)
    parts = getattr(hit, "geoms", [hit])
    spans = []
    for part in parts:
        if isinstance(part, LineString) and part.length > 0:
            xs = [x for x, _ in part.coords]
            spans.append((min(xs), max(xs)))
    return sorted(spans)


def sample_point(polygon: Polygon, stream: RngStream) -> GeoPoint:
    """Uniform point inside the polygon by rejection from its bounding box."""
    shape = check_perimeter(polygon)
    minx, miny, maxx, maxy = shape.bounds
    for _ in range(_MAX_REJECTIONS):
        x = float(stream.uniform(minx, maxx))
        y = float(stream.uniform(miny, maxy))
        if shape.contains(Point(x, y)):
            return GeoPoint(x_m=x, y_m=y)
    raise ParameterError("could not sample a point inside the perimeter")
