"""CSV emission and parsing for metrics, summaries, positions and dumps.

Dialect: comma separator, '.' decimal point, LF line endings, mandatory header
row. Floats are written as full-precision scientific notation so files
round-trip bit-exactly.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .fis1 import RuleBase1, eval_fis1
from .fis2 import RuleBase2, eval_t2fis
from .network import Network
from .simulator import RoundMetrics, SimResult

METRICS_HEADER = ("round", "alive", "dead", "total_j", "avg_j", "ch_count")
SUMMARY_HEADER = ("fnd", "hnd", "lnd", "seed")


def fmt(x: float) -> str:
    return f"{x:.16e}"


def _open_writer(path: str | Path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def write_metrics_csv(result: SimResult, path: str | Path) -> None:
    """One row per round in simulation order."""
    fh, w = _open_writer(path)
    with fh:
        w.writerow(METRICS_HEADER)
        for m in result.rounds:
            w.writerow((m.round, m.alive, m.dead, fmt(m.total_j), fmt(m.avg_j), m.ch_count))


def read_metrics_csv(path: str | Path) -> list[RoundMetrics]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != METRICS_HEADER:
            raise ValueError(f"unexpected metrics header {header}")
        for row in reader:
            out.append(
                RoundMetrics(
                    round=int(row[0]),
                    alive=int(row[1]),
                    dead=int(row[2]),
                    total_j=float(row[3]),
                    avg_j=float(row[4]),
                    ch_count=int(row[5]),
                )
            )
    return out


def write_summary_csv(results: Iterable[SimResult], path: str | Path) -> None:
    """One row per run; undefined lifetime events are left empty."""
    fh, w = _open_writer(path)
    with fh:
        w.writerow(SUMMARY_HEADER)
        for r in results:
            w.writerow(
                (
                    "" if r.fnd is None else r.fnd,
                    "" if r.hnd is None else r.hnd,
                    "" if r.lnd is None else r.lnd,
                    r.seed,
                )
            )


def write_positions_csv(net: Network, path: str | Path) -> None:
    fh, w = _open_writer(path)
    with fh:
        w.writerow(("id", "x", "y"))
        for nd in net.nodes:
            w.writerow((nd.id, fmt(nd.x), fmt(nd.y)))


def read_positions_csv(path: str | Path) -> list[tuple[float, float]]:
    """Positions ordered by node id; ids must be the contiguous range 0..n-1."""
    rows: dict[int, tuple[float, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != ("id", "x", "y"):
            raise ValueError(f"unexpected positions header {header}")
        for row in reader:
            nid = int(row[0])
            if nid in rows:
                raise ValueError(f"duplicate node id {nid} in positions file")
            rows[nid] = (float(row[1]), float(row[2]))
    if sorted(rows) != list(range(len(rows))):
        raise ValueError("positions file must list node ids 0..n-1")
    return [rows[i] for i in range(len(rows))]


def write_clusters_csv(rows: Sequence[tuple], path: str | Path) -> None:
    """Per-round membership dump: (round, ch_id, member_id, radius, next_hop)."""
    fh, w = _open_writer(path)
    with fh:
        w.writerow(("round", "ch_id", "member_id", "radius", "next_hop"))
        for rnd, ch, member, radius, hop in rows:
            w.writerow(
                (rnd, ch, "" if member is None else member, fmt(radius), "BS" if hop is None else hop)
            )


def cluster_rows(round_index: int, clusters, routes) -> list[tuple]:
    rows = []
    for c in clusters:
        hop = routes.get(c.head)
        if not c.members:
            rows.append((round_index, c.head, None, c.radius, hop))
        for m in c.members:
            rows.append((round_index, c.head, m, c.radius, hop))
    return rows


def write_fis1_surface(rb: RuleBase1, samples: int, path: str | Path, grid: int = 21) -> None:
    """(db, re, conc) -> (radius_norm, chance) over a uniform grid."""
    fh, w = _open_writer(path)
    with fh:
        w.writerow(("db", "re", "conc", "radius_norm", "chance"))
        steps = [i / (grid - 1) for i in range(grid)]
        for db in steps:
            for re in steps:
                for conc in steps:
                    out = eval_fis1(rb, {"distance": db, "energy": re, "concentration": conc}, samples)
                    w.writerow((fmt(db), fmt(re), fmt(conc), fmt(out["radius"]), fmt(out["chance"])))


def write_fis2_surface(rb: RuleBase2, path: str | Path, grid: int = 101) -> None:
    """(db, re) -> (radius_norm, chance) over a uniform grid."""
    fh, w = _open_writer(path)
    with fh:
        w.writerow(("db", "re", "radius_norm", "chance"))
        steps = [i / (grid - 1) for i in range(grid)]
        for db in steps:
            for re in steps:
                radius, chance = eval_t2fis(rb, db, re)
                w.writerow((fmt(db), fmt(re), fmt(radius), fmt(chance)))
