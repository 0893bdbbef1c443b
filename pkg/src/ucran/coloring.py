"""Greedy pilot coloring with a per-pilot reuse cap.

Saturation-driven greedy (Dsatur ordering): repeatedly color the vertex
that currently sees the most distinct colors in its neighborhood, breaking
ties by static degree and then by lowest user id.  A color is admissible
for a vertex when no neighbor holds it and fewer than ``reuse_cap`` users
hold it network-wide; the lowest admissible color wins, and a fresh color
is opened only when none qualifies.  All rules are deterministic, so a
given graph always yields the same assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conflict_graph import ConflictGraph


@dataclass(frozen=True)
class PilotAssignment:
    """Map from user id to pilot index 0..num_pilots-1."""

    pilot_of: dict[int, int]
    num_pilots: int

    @property
    def groups(self) -> dict[int, list[int]]:
        """Users per pilot, each list sorted by user id."""
        out: dict[int, list[int]] = {c: [] for c in range(self.num_pilots)}
        for k in sorted(self.pilot_of):
            out[self.pilot_of[k]].append(k)
        return out

    def group_sizes(self) -> np.ndarray:
        sizes = np.zeros(self.num_pilots, dtype=np.int64)
        for c in self.pilot_of.values():
            sizes[c] += 1
        return sizes


def dsatur_color(graph: ConflictGraph, reuse_cap: int) -> PilotAssignment:
    """Color the graph's active users under the reuse cap."""
    if reuse_cap < 1:
        raise ValueError("reuse_cap must be >= 1")
    vertices = [int(u) for u in graph.users]
    adjacency = graph.adjacency
    static_degree = {k: int(adjacency[k].sum()) for k in vertices}

    pilot_of: dict[int, int] = {}
    neighbor_colors: dict[int, set[int]] = {k: set() for k in vertices}
    color_count: list[int] = []
    uncolored = set(vertices)

    while uncolored:
        # max saturation, then max degree, then lowest id
        k = min(uncolored, key=lambda v: (-len(neighbor_colors[v]), -static_degree[v], v))
        forbidden = neighbor_colors[k]
        color = next(
            (c for c in range(len(color_count))
             if c not in forbidden and color_count[c] < reuse_cap),
            len(color_count),
        )
        if color == len(color_count):
            color_count.append(0)
        color_count[color] += 1
        pilot_of[k] = color
        uncolored.discard(k)
        for nb in np.flatnonzero(adjacency[k]):
            nb = int(nb)
            if nb in neighbor_colors:
                neighbor_colors[nb].add(color)

    return PilotAssignment(pilot_of=pilot_of, num_pilots=len(color_count))


def validate_assignment(graph: ConflictGraph, assignment: PilotAssignment,
                        reuse_cap: int) -> None:
    """Raise if the assignment is not a proper capped coloring of the graph."""
    pilot_of = assignment.pilot_of
    active = {int(u) for u in graph.users}
    if set(pilot_of) != active:
        raise AssertionError("assignment does not cover the active users exactly")
    for k, c in pilot_of.items():
        if not 0 <= c < assignment.num_pilots:
            raise AssertionError(f"user {k} holds out-of-range pilot {c}")
        for nb in np.flatnonzero(graph.adjacency[k]):
            if pilot_of.get(int(nb)) == c:
                raise AssertionError(f"adjacent users {k} and {int(nb)} share pilot {c}")
    sizes = assignment.group_sizes()
    if (sizes > reuse_cap).any():
        raise AssertionError("a pilot group exceeds the reuse cap")
    if (sizes == 0).any():
        raise AssertionError("pilot indices are not contiguous")
