"""Figures and delimited tables for divisions.

Figures are SVG produced through matplotlib's SVG backend with a fixed
hash salt and no timestamp, so the same division always yields the
same bytes.
"""

import csv
import io

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .errors import PreconditionError  # noqa: E402
from .grid import GridSpec, LatticeCutSet, piece_interval, verify_lattice_cuts  # noqa: E402

PALETTE = ("#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3",
           "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5")

RC = {
    "svg.hashsalt": "beadcut",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "font.size": 10,
}


def necklace_as_grid(necklace):
    return GridSpec((tuple(necklace.values),), necklace.n_players)


def _square_label(grid, r, c, names):
    return "".join(names[p] for p, v in enumerate(grid.values[r][c]) if v > 0)


def draw_division(ax, grid, cuts, assignment=None, names=None):
    """Draw squares, shaded pieces and cut paths onto ``ax``."""
    names = names or [str(p) for p in range(grid.n_players)]
    k, l = grid.rows, grid.cols
    n_pieces = len(cuts.cuts) + 1
    for j in range(n_pieces):
        holder = assignment.index(j) if assignment is not None else j
        color = PALETTE[holder % len(PALETTE)]
        for r in range(k):
            lo, hi = piece_interval(cuts.cuts, l, j, r)
            if hi > lo:
                ax.add_patch(Rectangle((lo, r), hi - lo, 1, facecolor=color,
                                       edgecolor="none", zorder=0))
    for x in range(l + 1):
        ax.plot([x, x], [0, k], color="0.6", lw=0.6, zorder=1)
    for y in range(k + 1):
        ax.plot([0, l], [y, y], color="0.6", lw=0.6, zorder=1)
    for r in range(k):
        for c in range(l):
            label = _square_label(grid, r, c, names)
            if label:
                ax.text(c + 0.5, r + 0.5, label, ha="center", va="center", zorder=3)
    for i in range(len(cuts.cuts)):
        pts = cuts.path(i)
        xs = [pts[0][0]] + [x for x, _ in pts] + [pts[-1][0]]
        ys = [-0.3] + [y for _, y in pts] + [k + 0.3]
        ax.plot(xs, ys, color="black", lw=3, solid_joinstyle="miter", zorder=2)
    if assignment is not None:
        for p, j in enumerate(assignment):
            ax.plot([], [], marker="s", ls="none", color=PALETTE[p % len(PALETTE)],
                    label=f"{names[p]}: piece {j}")
        ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
    ax.set_xlim(-0.2, l + 0.2)
    ax.set_ylim(-0.5, k + 0.5)
    ax.set_aspect("equal")
    ax.axis("off")


def render_svg(grid, cuts, assignment=None, names=None):
    """SVG text of a lattice division; refuses cut sets that do not verify."""
    check = verify_lattice_cuts(grid, cuts)
    if not check:
        raise PreconditionError("cannot render invalid cuts: " + "; ".join(check.diagnostics))
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(0.8 * grid.cols + 2.5, 0.8 * grid.rows + 0.6))
        draw_division(ax, grid, cuts, assignment, names)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
        plt.close(fig)
    return buf.getvalue()


def render_result(result):
    """SVG for a :class:`~beadcut.instances.DivisionResult`."""
    problem = result.instance.problem
    if result.instance.kind == "necklace":
        grid = necklace_as_grid(problem)
        cuts = LatticeCutSet(tuple((x,) for x in result.cuts), 1, problem.length)
    else:
        grid, cuts = problem, result.cuts
    return render_svg(grid, cuts, result.assignment, result.instance.players)


def value_table(result):
    """Tab-separated value matrix: one line per player."""
    names = result.instance.players
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    n = len(names)
    writer.writerow(["player", "piece"] + [f"piece_{j}" for j in range(n)] + ["envy"])
    for p, name in enumerate(names):
        writer.writerow([name, result.assignment[p]]
                        + [str(v) for v in result.value_matrix[p]]
                        + [str(result.envy[p])])
    return buf.getvalue()
