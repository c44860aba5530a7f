from dataclasses import dataclass
from typing import Sequence

from igacontact.nurbs.vo import VOBody


@dataclass(frozen=True)
class DofSummary:
    body: str
    interface: int
    bulk: int

    @property
    def total(self) -> int:
        return self.interface + self.bulk


def dof_summary(body: VOBody) -> DofSummary:
    """Displacement DOFs on the contact face slab and in the remaining bulk."""
    return DofSummary(body=body.name, interface=3 * body.n_face, bulk=3 * body.n_bulk)


def format_dof_table(rows: Sequence[Sequence[DofSummary]], labels: Sequence[str]) -> str:
    """Render one line per discretization with interface/bulk DOFs of every body and the
    total.

    :param rows: Per discretization the summaries of all bodies
    :param labels: Discretization labels, one per row
    """
    if len(rows) != len(labels):
        raise ValueError("one label per row required")
    if not rows:
        return ""
    bodies = [s.body for s in rows[0]]
    header = ["Discretization"]
    for name in bodies:
        header.extend([f"{name} interface", f"{name} bulk"])
    header.append("Total")
    table = [header]
    for label, row in zip(labels, rows):
        line = [label]
        for summary in row:
            line.extend([str(summary.interface), str(summary.bulk)])
        line.append(str(sum(s.total for s in row)))
        table.append(line)
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
