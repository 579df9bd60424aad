"""Shortest paths over the lane graph and arclength queries along them."""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidArgumentError, NoPathError
from ..world.geometry import Vec2
from .network import RoadNetwork, TurnKind


@dataclass(frozen=True)
class Path:
    """Ordered waypoints from start to goal with one turn kind per segment."""

    waypoints: Tuple[Vec2, ...]
    segment_kinds: Tuple[TurnKind, ...]
    nodes: Tuple[str, ...] = ()
    _points: np.ndarray = field(init=False, repr=False, compare=False)
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        waypoints = tuple(self.waypoints)
        kinds = tuple(TurnKind(k) for k in self.segment_kinds)
        if not waypoints:
            raise InvalidArgumentError("A path needs at least one waypoint")
        if len(kinds) != len(waypoints) - 1:
            raise InvalidArgumentError(
                f"Expected {len(waypoints) - 1} segment kinds, got {len(kinds)}"
            )
        points = np.array([[p.x, p.y] for p in waypoints], dtype=float)
        steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if np.any(steps <= 0.0):
            raise InvalidArgumentError("Consecutive waypoints must be distinct")
        object.__setattr__(self, "waypoints", waypoints)
        object.__setattr__(self, "segment_kinds", kinds)
        object.__setattr__(self, "nodes", tuple(self.nodes))
        points.setflags(write=False)
        cumulative = np.concatenate([[0.0], np.cumsum(steps)])
        cumulative.setflags(write=False)
        object.__setattr__(self, "_points", points)
        object.__setattr__(self, "_cumulative", cumulative)

    @property
    def start(self) -> Vec2:
        return self.waypoints[0]

    @property
    def goal(self) -> Vec2:
        return self.waypoints[-1]

    @property
    def length(self) -> float:
        return float(self._cumulative[-1])

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def cumulative(self) -> np.ndarray:
        return self._cumulative

    def segment_index(self, s: float) -> int:
        if len(self.waypoints) == 1:
            return 0
        idx = int(np.searchsorted(self._cumulative, s, side="right")) - 1
        return min(max(idx, 0), len(self.segment_kinds) - 1)

    def point_at(self, s: float) -> Vec2:
        """Position at arclength s, clamped to the path."""
        if len(self.waypoints) == 1:
            return self.start
        s = min(max(s, 0.0), self.length)
        idx = self.segment_index(s)
        seg_len = self._cumulative[idx + 1] - self._cumulative[idx]
        t = (s - self._cumulative[idx]) / seg_len
        p = self._points[idx] + t * (self._points[idx + 1] - self._points[idx])
        return Vec2(float(p[0]), float(p[1]))

    def heading_at(self, s: float) -> float:
        if len(self.waypoints) == 1:
            return 0.0
        idx = self.segment_index(min(max(s, 0.0), self.length))
        d = self._points[idx + 1] - self._points[idx]
        return math.atan2(d[1], d[0])

    def segment_kind_at(self, s: float) -> TurnKind:
        if not self.segment_kinds:
            return TurnKind.STRAIGHT
        return self.segment_kinds[self.segment_index(min(max(s, 0.0), self.length))]

    def kind_runs(self) -> List[Tuple[float, float, TurnKind]]:
        """Maximal stretches of equal turn kind as (s_start, s_end, kind)."""
        runs: List[Tuple[float, float, TurnKind]] = []
        for idx, kind in enumerate(self.segment_kinds):
            s0, s1 = float(self._cumulative[idx]), float(self._cumulative[idx + 1])
            if runs and runs[-1][2] == kind:
                runs[-1] = (runs[-1][0], s1, kind)
            else:
                runs.append((s0, s1, kind))
        return runs

    def project(self, point: Vec2, hint: Optional[int] = None, window: int = 12) -> Tuple[float, float, int]:
        """Closest point on the path as (arclength, signed lateral offset, segment index).

        Positive lateral offsets lie to the left of the travel direction. With a
        segment hint only a window of segments around it is searched.
        """
        if len(self.waypoints) == 1:
            return 0.0, point.distance_to(self.start), 0
        n = len(self.segment_kinds)
        lo, hi = (0, n) if hint is None else (max(hint - 2, 0), min(hint + window, n))
        a = self._points[lo:hi]
        b = self._points[lo + 1:hi + 1]
        ab = b - a
        p = np.array([point.x, point.y])
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
        closest = a + t[:, None] * ab
        dist = np.linalg.norm(p - closest, axis=1)
        best = int(np.argmin(dist))
        idx = lo + best
        seg = ab[best]
        offset = p - closest[best]
        cross = seg[0] * offset[1] - seg[1] * offset[0]
        lateral = float(dist[best]) * (1.0 if cross >= 0 else -1.0)
        s = float(self._cumulative[idx] + t[best] * np.linalg.norm(seg))
        return s, lateral, idx


def shortest_route(net: RoadNetwork, start: str, goal: str) -> Tuple[List[str], float]:
    """Dijkstra over edge lengths; equal-cost ties resolve to the lexicographically smaller node."""
    net.node(start)
    net.node(goal)
    dist: Dict[str, float] = {start: 0.0}
    previous: Dict[str, str] = {}
    heap: List[Tuple[float, str]] = [(0.0, start)]
    done = set()
    while heap:
        d, name = heapq.heappop(heap)
        if name in done:
            continue
        done.add(name)
        if name == goal:
            break
        for edge in net.outgoing(name):
            if edge.target in done:
                continue
            candidate = d + edge.length
            known = dist.get(edge.target)
            if known is None or candidate < known - 1e-12 or (
                abs(candidate - known) <= 1e-12 and name < previous.get(edge.target, name)
            ):
                dist[edge.target] = candidate
                previous[edge.target] = name
                heapq.heappush(heap, (candidate, edge.target))
    if goal not in done:
        raise NoPathError(f"No path from {start} to {goal}")
    route = [goal]
    while route[-1] != start:
        route.append(previous[route[-1]])
    route.reverse()
    return route, dist[goal]


def path_from_route(net: RoadNetwork, route: Sequence[str]) -> Path:
    """Concatenate the waypoints of consecutive edges along a node route."""
    if len(route) == 1:
        return Path((net.node(route[0]).position,), (), tuple(route))
    waypoints: List[Vec2] = []
    kinds: List[TurnKind] = []
    for source, target in zip(route, route[1:]):
        edge = next((e for e in net.outgoing(source) if e.target == target), None)
        if edge is None:
            raise InvalidArgumentError(f"No edge {source}->{target}")
        points = list(edge.waypoints)
        if waypoints and waypoints[-1].distance_to(points[0]) < 1e-9:
            points = points[1:]
        for point in points:
            if waypoints and waypoints[-1].distance_to(point) < 1e-9:
                continue
            if waypoints:
                kinds.append(edge.turn_kind)
            waypoints.append(point)
    # endpoints are exact node positions
    waypoints[0] = net.node(route[0]).position
    waypoints[-1] = net.node(route[-1]).position
    return Path(tuple(waypoints), tuple(kinds), tuple(route))


def shortest_path(net: RoadNetwork, start: str, goal: str) -> Path:
    """Shortest start->goal path; raises NoPathError when the goal is unreachable."""
    route, _ = shortest_route(net, start, goal)
    return path_from_route(net, route)


def path_crossings(a: Path, b: Path, merge_distance: float = 0.5) -> List[Tuple[float, float]]:
    """Arclength pairs (s_a, s_b) where the two polylines cross, ordered along a."""
    if len(a.waypoints) < 2 or len(b.waypoints) < 2:
        return []
    p1, p2 = a.points[:-1], a.points[1:]
    q1, q2 = b.points[:-1], b.points[1:]
    r = (p2 - p1)[:, None, :]
    s = (q2 - q1)[None, :, :]
    qp = q1[None, :, :] - p1[:, None, :]
    denom = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / denom
        u = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / denom
    hits = (np.abs(denom) > 1e-12) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    seg_a = np.diff(a.cumulative)
    seg_b = np.diff(b.cumulative)
    crossings: List[Tuple[float, float]] = []
    for i, j in zip(*np.nonzero(hits)):
        sa = float(a.cumulative[i] + t[i, j] * seg_a[i])
        sb = float(b.cumulative[j] + u[i, j] * seg_b[j])
        if any(abs(sa - x) < merge_distance and abs(sb - y) < merge_distance for x, y in crossings):
            continue
        crossings.append((sa, sb))
    return sorted(crossings)
