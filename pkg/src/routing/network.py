"""Directed lane graphs for the intersection environments."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..errors import InvalidArgumentError
from ..world.geometry import Vec2

STRAIGHT_SPACING = 2.0  # m between waypoints on straights
ARC_SPACING = 1.0  # m between waypoints on turn arcs

ARM_DIRECTIONS: Dict[str, Vec2] = {
    "N": Vec2(0.0, 1.0),
    "E": Vec2(1.0, 0.0),
    "S": Vec2(0.0, -1.0),
    "W": Vec2(-1.0, 0.0),
}


class EnvironmentKind(str, Enum):
    """Supported intersection environments."""

    T_INTERSECTION = "t_intersection"
    FOUR_WAY = "four_way"


class TurnKind(str, Enum):
    """Kind of a path segment."""

    STRAIGHT = "straight"
    LEFT = "left"
    RIGHT = "right"


class RoadLayout(BaseModel):
    """Geometry of a single-intersection map."""

    lane_width: float = Field(3.5, gt=0, description="Lane width in meters")
    intersection_half_size: float = Field(7.0, gt=0, description="Half size of the intersection box in meters")
    arm_lengths: Dict[str, float] = Field(
        default_factory=lambda: {"N": 40.0, "E": 40.0, "S": 22.0, "W": 12.0},
        description="Arm length from the intersection center, meters, keyed by N/E/S/W",
    )
    sidewalk_offset: float = Field(1.0, ge=0, description="Gap between road edge and sidewalk blocks, meters")
    building_inset: float = Field(3.0, ge=0, description="Gap between sidewalk edge and buildings, meters")
    building_size: float = Field(18.0, gt=0, description="Maximum building side length, meters")
    margin: float = Field(25.0, gt=0, description="Map margin beyond the arm ends, meters")

    @model_validator(mode="after")
    def _check_arms(self) -> "RoadLayout":
        unknown = set(self.arm_lengths) - set(ARM_DIRECTIONS)
        if unknown:
            raise ValueError(f"Unknown arms: {sorted(unknown)}")
        if len(self.arm_lengths) < 3:
            raise ValueError("A layout needs at least three arms")
        for arm, length in self.arm_lengths.items():
            if length <= self.intersection_half_size:
                raise ValueError(f"Arm {arm} ({length} m) does not reach beyond the intersection box")
        if self.lane_width >= self.intersection_half_size:
            raise ValueError("Intersection box must be wider than one lane")
        return self

    @property
    def road_half_width(self) -> float:
        return self.lane_width


# a managed run that yields once takes about 165 steps (T) and 120 steps (four-way)
DEFAULT_LAYOUTS: Dict[EnvironmentKind, RoadLayout] = {
    EnvironmentKind.T_INTERSECTION: RoadLayout(arm_lengths={"E": 48.0, "S": 22.0, "W": 48.0}),
    EnvironmentKind.FOUR_WAY: RoadLayout(arm_lengths={"N": 40.0, "E": 40.0, "S": 22.0, "W": 12.0}),
}


@dataclass(frozen=True)
class Node:
    """A lane waypoint with the lane's travel direction."""

    name: str
    position: Vec2
    direction: float


@dataclass(frozen=True)
class Edge:
    """A directed lane connection between two nodes."""

    source: str
    target: str
    length: float
    turn_kind: TurnKind = TurnKind.STRAIGHT
    waypoints: Tuple[Vec2, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidArgumentError(f"Edge {self.source}->{self.target}: length must be positive")


class RoadNetwork:
    """Directed lane graph; immutable after construction."""

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge]):
        self._nodes: Dict[str, Node] = {}
        for node in nodes:
            if node.name in self._nodes:
                raise InvalidArgumentError(f"Duplicate node: {node.name}")
            self._nodes[node.name] = node
        normalized: List[Edge] = []
        for edge in edges:
            if edge.source not in self._nodes or edge.target not in self._nodes:
                raise InvalidArgumentError(f"Edge {edge.source}->{edge.target} references an unknown node")
            if not edge.waypoints:
                edge = Edge(
                    edge.source,
                    edge.target,
                    edge.length,
                    edge.turn_kind,
                    (self._nodes[edge.source].position, self._nodes[edge.target].position),
                )
            normalized.append(edge)
        self._edges: Tuple[Edge, ...] = tuple(normalized)
        self._outgoing: Dict[str, Tuple[Edge, ...]] = {
            name: tuple(sorted((e for e in self._edges if e.source == name), key=lambda e: e.target))
            for name in self._nodes
        }

    @property
    def nodes(self) -> Dict[str, Node]:
        return dict(self._nodes)

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    def node(self, name: str) -> Node:
        try:
            return self._nodes[name]
        except KeyError:
            raise InvalidArgumentError(f"Unknown node: {name}") from None

    def outgoing(self, name: str) -> Tuple[Edge, ...]:
        return self._outgoing.get(name, ())

    def movements(self) -> List[Edge]:
        """Edges crossing the intersection box."""
        return [e for e in self._edges if e.source.endswith("_in_stop") and e.target.endswith("_out_start")]


def _right_of(direction: Vec2) -> Vec2:
    return Vec2(direction.y, -direction.x)


def _left_of(direction: Vec2) -> Vec2:
    return Vec2(-direction.y, direction.x)


def _straight_waypoints(start: Vec2, end: Vec2, spacing: float = STRAIGHT_SPACING) -> Tuple[Vec2, ...]:
    length = start.distance_to(end)
    count = max(1, int(math.ceil(length / spacing - 1e-9)))
    points = [start + (end - start) * (i / count) for i in range(count)]
    return tuple(points) + (end,)


def _arc_waypoints(start: Vec2, end: Vec2, heading_in: Vec2, left: bool) -> Tuple[Tuple[Vec2, ...], float]:
    radius = start.distance_to(end) / math.sqrt(2.0)
    normal = _left_of(heading_in) if left else _right_of(heading_in)
    center = start + normal * radius
    theta0 = math.atan2(start.y - center.y, start.x - center.x)
    sweep = math.pi / 2.0 if left else -math.pi / 2.0
    length = radius * math.pi / 2.0
    count = max(2, int(math.ceil(length / ARC_SPACING - 1e-9)))
    points = [
        Vec2(center.x + radius * math.cos(theta0 + sweep * i / count), center.y + radius * math.sin(theta0 + sweep * i / count))
        for i in range(count)
    ]
    return tuple([start] + points[1:]) + (end,), length


def polyline_length(points: Tuple[Vec2, ...]) -> float:
    arr = np.array([[p.x, p.y] for p in points])
    return float(np.linalg.norm(np.diff(arr, axis=0), axis=1).sum())


def _classify_turn(heading_in: Vec2, heading_out: Vec2) -> TurnKind:
    if heading_in.dot(heading_out) > 0.5:
        return TurnKind.STRAIGHT
    cross = heading_in.x * heading_out.y - heading_in.y * heading_out.x
    return TurnKind.LEFT if cross > 0 else TurnKind.RIGHT


def build_network(env: EnvironmentKind, layout: Optional[RoadLayout] = None) -> RoadNetwork:
    """Two-lane right-hand-traffic lane graph with every legal intersection movement."""
    env = EnvironmentKind(env)
    layout = layout or DEFAULT_LAYOUTS[env]
    arms = [arm for arm in ("N", "E", "S", "W") if arm in layout.arm_lengths]
    if env == EnvironmentKind.FOUR_WAY and len(arms) != 4:
        raise InvalidArgumentError("A four-way layout needs arms N, E, S and W")
    if env == EnvironmentKind.T_INTERSECTION and len(arms) != 3:
        raise InvalidArgumentError("A T-intersection layout needs exactly three arms")

    half_lane = layout.lane_width / 2.0
    box = layout.intersection_half_size
    nodes: List[Node] = []
    edges: List[Edge] = []

    for arm in arms:
        outward = ARM_DIRECTIONS[arm]
        inbound = outward * -1.0
        length = layout.arm_lengths[arm]
        in_offset = _right_of(inbound) * half_lane
        out_offset = _right_of(outward) * half_lane
        in_heading = math.atan2(inbound.y, inbound.x)
        out_heading = math.atan2(outward.y, outward.x)
        in_start = Node(f"{arm}_in_start", outward * length + in_offset, in_heading)
        in_stop = Node(f"{arm}_in_stop", outward * box + in_offset, in_heading)
        out_start = Node(f"{arm}_out_start", outward * box + out_offset, out_heading)
        out_end = Node(f"{arm}_out_end", outward * length + out_offset, out_heading)
        nodes.extend([in_start, in_stop, out_start, out_end])
        for a, b in ((in_start, in_stop), (out_start, out_end)):
            points = _straight_waypoints(a.position, b.position)
            edges.append(Edge(a.name, b.name, polyline_length(points), TurnKind.STRAIGHT, points))

    by_name = {node.name: node for node in nodes}
    for source_arm in arms:
        for target_arm in arms:
            if source_arm == target_arm:
                continue
            start = by_name[f"{source_arm}_in_stop"]
            end = by_name[f"{target_arm}_out_start"]
            heading_in = ARM_DIRECTIONS[source_arm] * -1.0
            heading_out = ARM_DIRECTIONS[target_arm]
            kind = _classify_turn(heading_in, heading_out)
            if kind == TurnKind.STRAIGHT:
                points = _straight_waypoints(start.position, end.position)
            else:
                points, _ = _arc_waypoints(start.position, end.position, heading_in, left=kind == TurnKind.LEFT)
            edges.append(Edge(start.name, end.name, polyline_length(points), kind, points))

    return RoadNetwork(nodes, edges)
