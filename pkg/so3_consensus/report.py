"""Reports comparing rotation averages, rendered as text or JSON."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from .means import chordal_cost, geodesic_cost
from .models import MethodResult, WeightedDataset
from .so3 import dist_chordal, dist_geodesic, rotation_to_quat


class MethodEntry(BaseModel):
    """One method's average and how it was obtained."""

    method: str
    matrix: list[list[float]]
    quaternion: list[float]
    status: str
    termination_time: float | None = None
    iterations: int | None = None
    chordal_cost: float
    geodesic_cost: float


class Report(BaseModel):
    """Averages of one dataset and the pairwise distances between them."""

    command: str
    source: str
    n: int
    weighted: bool
    methods: list[MethodEntry]
    geodesic_distances: dict[str, dict[str, float]] = Field(default_factory=dict)
    chordal_distances: dict[str, dict[str, float]] = Field(default_factory=dict)
    metadata: dict[str, Any] = Field(default_factory=dict)

    def entry(self, method: str) -> MethodEntry:
        """Look up a method by name."""
        for entry in self.methods:
            if entry.method == method:
                return entry
        raise KeyError(method)


def build_report(
    command: str,
    source: str,
    data: WeightedDataset,
    results: list[MethodResult],
    metadata: dict[str, Any] | None = None,
) -> Report:
    """Collect method results into a report with symmetric distance tables.

    Args:
        command: CLI command that produced the results
        source: Dataset description (usually the file path)
        data: Dataset the objective values are evaluated on
        results: One entry per method that produced an average
        metadata: Run parameters to record

    Returns:
        Report ready for rendering or serialization
    """
    entries = []
    for result in results:
        entries.append(
            MethodEntry(
                method=result.method,
                matrix=result.average.tolist(),
                quaternion=rotation_to_quat(result.average).tolist(),
                status=result.status,
                termination_time=result.termination_time,
                iterations=result.iterations,
                chordal_cost=chordal_cost(data, result.average),
                geodesic_cost=geodesic_cost(data, result.average),
            )
        )

    geodesic: dict[str, dict[str, float]] = {}
    chordal: dict[str, dict[str, float]] = {}
    for a in results:
        geodesic[a.method] = {}
        chordal[a.method] = {}
        for b in results:
            if a.method == b.method:
                geodesic[a.method][b.method] = 0.0
                chordal[a.method][b.method] = 0.0
            elif b.method in geodesic:
                # Mirror the earlier row so the table is exactly symmetric
                geodesic[a.method][b.method] = geodesic[b.method][a.method]
                chordal[a.method][b.method] = chordal[b.method][a.method]
            else:
                geodesic[a.method][b.method] = dist_geodesic(a.average, b.average)
                chordal[a.method][b.method] = dist_chordal(a.average, b.average)

    return Report(
        command=command,
        source=source,
        n=len(data),
        weighted=not data.is_unweighted,
        methods=entries,
        geodesic_distances=geodesic,
        chordal_distances=chordal,
        metadata=metadata or {},
    )


def render_report(report: Report, representation: str = "matrix") -> str:
    """Render a report as a plain-text table.

    Args:
        report: Report to render
        representation: "matrix" prints each average as 3x3, "quat" as w, x, y, z

    Returns:
        Multi-line text
    """
    lines = []

    # Header
    lines.append("=" * 72)
    lines.append(f"Rotation averages ({report.command})")
    lines.append("=" * 72)
    lines.append(f"Source: {report.source}")
    lines.append(f"Rotations: {report.n}" + (" (weighted)" if report.weighted else ""))
    lines.append("")

    for entry in report.methods:
        header = f"[{entry.method}] status={entry.status}"
        if entry.termination_time is not None:
            header += f"  T={entry.termination_time:.2f}"
        if entry.iterations is not None:
            header += f"  iterations={entry.iterations}"
        lines.append(header)
        if representation == "quat":
            lines.append("   " + "  ".join(f"{v: .9f}" for v in entry.quaternion))
        else:
            for row in entry.matrix:
                lines.append("   " + "  ".join(f"{v: .9f}" for v in row))
        lines.append(
            f"   sum k*d_F^2 = {entry.chordal_cost:.9g}   sum k*d_R^2 = {entry.geodesic_cost:.9g}"
        )
        lines.append("")

    if len(report.methods) > 1:
        lines.extend(_render_table("Geodesic distance (rad)", report.geodesic_distances))
        lines.append("")
        lines.extend(_render_table("Chordal distance", report.chordal_distances))
        lines.append("")

    if report.metadata:
        lines.append("-" * 72)
        for key in sorted(report.metadata):
            lines.append(f"{key}: {report.metadata[key]}")

    return "\n".join(lines)


def _render_table(title: str, table: dict[str, dict[str, float]]) -> list[str]:
    """Render a square distance table."""
    names = list(table)
    width = max(12, *(len(n) + 2 for n in names))
    lines = [title, " " * width + "".join(f"{n:>{width}}" for n in names)]
    for a in names:
        lines.append(f"{a:<{width}}" + "".join(f"{table[a][b]:>{width}.3e}" for b in names))
    return lines
