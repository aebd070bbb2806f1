"""Generator x solver experiment grids with persisted, re-verifiable results.

A sweep writes into an append-only results directory:

* ``instances/<id>.rbf``      every generated instance, one file each
* ``reports/<id>-<solver>.json``  the solver report for each grid cell
* ``sweeps/<stamp>/records.jsonl``  one JSON record per cell
* ``sweeps/<stamp>/summary.csv``    flat summary, one row per record

Records carry everything needed to recompute their pass/fail fields,
and each cell is independently re-checkable with ``verify`` from the
persisted instance and report alone.  Identical invocations with the
same seed produce byte-identical records except for wall-time fields.
Cells may run concurrently (each writes only its own files); the
record list and summary are reduced by a single writer at the end.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import bounds as bounds_mod
from .constructions import ach_instance, cycle_instance, k4_union_instance, random_instance
from .core import Instance
from .fileformat import ReportDoc, serialize_instance, serialize_report
from .solvers import (
    CERT_EXACT,
    CERT_LOCAL,
    SampleExtendFailure,
    SolveReport,
    exact_max_rainbow,
    greedy_rainbow,
    local_search_rainbow,
    sample_and_extend,
)

SWEEP_CONSTRUCTIONS = ("cycle", "k4", "ach", "random")
SOLVERS = ("exact", "greedy", "local", "sample")


@dataclass(frozen=True)
class CellSpec:
    construction: str
    r: int
    n: int
    solver: str
    seed: int
    size: int | None = None  # random-matching size, defaults to n
    node_budget: int | None = None
    retries: int = 20

    @property
    def instance_id(self) -> str:
        parts = [self.construction, f"r{self.r}", f"n{self.n}"]
        if self.construction == "random":
            parts.append(f"m{self.size if self.size is not None else self.n}")
            parts.append(f"seed{self.seed}")
        return "-".join(parts)

    @property
    def cell_id(self) -> str:
        return f"{self.instance_id}-{self.solver}-seed{self.seed}"


def build_instance(spec: CellSpec) -> Instance:
    if spec.construction == "cycle":
        return cycle_instance(spec.n)
    if spec.construction == "k4":
        return k4_union_instance(spec.n)
    if spec.construction == "ach":
        return ach_instance(spec.r, spec.n)
    if spec.construction == "random":
        size = spec.size if spec.size is not None else spec.n
        return random_instance(spec.r, spec.n, size, spec.seed)
    raise ValueError(f"unknown sweep construction {spec.construction!r}")


def cell_is_valid(spec: CellSpec) -> bool:
    """Grid cells with parameters outside a generator's domain are skipped."""
    try:
        if spec.construction == "cycle":
            return spec.r == 2 and spec.n >= 2
        if spec.construction == "k4":
            return spec.r == 2 and spec.n >= 3 and spec.n % 2 == 1
        if spec.construction == "ach":
            return spec.r >= 3 and spec.n % 2 == 0 and spec.n >= 2 ** (spec.r - 1)
        if spec.construction == "random":
            return spec.r >= 2 and spec.n >= 1
    except OverflowError:
        return False
    return False


def run_solver(
    inst: Instance,
    solver: str,
    seed: int | None = None,
    node_budget: int | None = None,
    retries: int = 20,
    instance_ref: str | None = None,
) -> ReportDoc:
    """Dispatch one solver run and package it as a report document."""
    if solver == "exact":
        result: SolveReport | SampleExtendFailure = exact_max_rainbow(inst, node_budget=node_budget)
    elif solver == "greedy":
        result = greedy_rainbow(inst)
    elif solver == "local":
        result = local_search_rainbow(inst, seed=seed)
    elif solver == "sample":
        result = sample_and_extend(inst, inst.n, seed=seed, retries=retries)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    if isinstance(result, SampleExtendFailure):
        return ReportDoc(
            solver=solver,
            certificate="failure",
            size=result.best.size,
            assignment=result.best,
            stats={"seed": result.seed, "attempts": result.attempts},
            instance=instance_ref,
            failure={
                "stage": result.stage,
                "detail": result.detail,
                "attempts": result.attempts,
                "diagnostics": {k: _jsonable(v) for k, v in result.diagnostics.items()},
            },
        )
    return ReportDoc(
        solver=solver,
        certificate=result.certificate,
        size=result.size,
        assignment=result.matching.sorted_by_colour(),
        stats={
            "nodes": result.stats.nodes,
            "swaps": result.stats.swaps,
            "wall_time": result.stats.wall_time,
            "seed": result.stats.seed,
            "extra": {k: _jsonable(v) for k, v in result.stats.extra.items()},
        },
        instance=instance_ref,
    )


def _jsonable(v: Any) -> Any:
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def bound_checks(spec: CellSpec, inst: Instance, doc: ReportDoc) -> dict[str, Any]:
    """Applicable bound values and their pass/fail, all recomputable
    from the fields stored alongside them."""
    n = inst.n
    N = inst.min_matching_size()
    certified = doc.certificate in (CERT_EXACT, CERT_LOCAL)
    out: dict[str, Any] = {}

    lb = bounds_mod.lower_bound_g_prime(spec.r, n)
    applicable = lb.domain_ok and certified and N >= n
    out["lower_bound_g_prime"] = {
        "value": str(lb.value),
        "applicable": applicable,
        "holds": (doc.size >= lb.ceiling or lb.value <= 0) if applicable else None,
    }

    gib_applicable = certified and spec.r >= 2
    if gib_applicable:
        gib = bounds_mod.check_gibounds(spec.r, n, N, doc.size)
        out["gibounds"] = {
            "lhs": str(gib.lhs),
            "rhs": str(gib.rhs),
            "applicable": True,
            "holds": gib.holds,
        }
    else:
        out["gibounds"] = {"lhs": None, "rhs": None, "applicable": False, "holds": None}

    if spec.construction == "ach":
        ab = bounds_mod.ach_bound(spec.r, n)
        applicable = ab.domain_ok and doc.certificate == CERT_EXACT
        out["ach_bound"] = {
            "value": str(ab.value),
            "applicable": applicable,
            "holds": (doc.size <= ab.floor) if applicable else None,
        }
    else:
        out["ach_bound"] = {"value": None, "applicable": False, "holds": None}
    return out


def _run_cell(args: tuple[CellSpec, str]) -> dict[str, Any]:
    spec, out_dir = args
    root = Path(out_dir)
    t0 = time.perf_counter()
    inst = build_instance(spec)
    inst_rel = f"instances/{spec.instance_id}.rbf"
    report_rel = f"reports/{spec.cell_id}.json"
    # concurrent cells that share an instance write identical bytes;
    # publish through a per-cell temp file so the path is always whole
    tmp = root / f"instances/.{spec.cell_id}.tmp"
    tmp.write_text(serialize_instance(inst))
    os.replace(tmp, root / inst_rel)
    doc = run_solver(
        inst,
        spec.solver,
        seed=spec.seed,
        node_budget=spec.node_budget,
        retries=spec.retries,
        instance_ref=f"../{inst_rel}",
    )
    (root / report_rel).write_text(serialize_report(doc))
    record: dict[str, Any] = {
        "cell": spec.cell_id,
        "construction": spec.construction,
        "r": spec.r,
        "n": spec.n,
        "solver": spec.solver,
        "seed": spec.seed,
        "size": doc.size,
        "certificate": doc.certificate
        if doc.failure is None
        else f"failure-{doc.failure['stage']}",
        "min_matching_size": inst.min_matching_size(),
        "vertex_count": inst.vertex_count(),
        "bounds": bound_checks(spec, inst, doc),
        "instance_file": inst_rel,
        "report_file": report_rel,
        "wall_time": time.perf_counter() - t0,
    }
    return record


_CSV_COLUMNS = [
    "cell",
    "construction",
    "r",
    "n",
    "solver",
    "seed",
    "size",
    "certificate",
    "min_matching_size",
    "lb_gprime_value",
    "lb_gprime_holds",
    "gibounds_holds",
    "ach_bound_value",
    "ach_bound_holds",
    "wall_time",
]


def _csv_row(record: dict[str, Any]) -> list[Any]:
    b = record["bounds"]

    def cell(v: Any) -> Any:
        return "" if v is None else v

    return [
        record["cell"],
        record["construction"],
        record["r"],
        record["n"],
        record["solver"],
        record["seed"],
        record["size"],
        record["certificate"],
        record["min_matching_size"],
        cell(b["lower_bound_g_prime"]["value"]),
        cell(b["lower_bound_g_prime"]["holds"]),
        cell(b["gibounds"]["holds"]),
        cell(b["ach_bound"]["value"]),
        cell(b["ach_bound"]["holds"]),
        record["wall_time"],
    ]


def run_sweep(
    cells: list[CellSpec], out_dir: str | Path, jobs: int = 1, stamp: str | None = None
) -> tuple[Path, list[dict[str, Any]]]:
    """Execute every cell, persist artifacts, return the sweep directory
    and the records in grid order."""
    root = Path(out_dir)
    (root / "instances").mkdir(parents=True, exist_ok=True)
    (root / "reports").mkdir(parents=True, exist_ok=True)
    if stamp is None:
        stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
    sweep_dir = root / "sweeps" / stamp
    suffix = 0
    while sweep_dir.exists():
        suffix += 1
        sweep_dir = root / "sweeps" / f"{stamp}-{suffix}"
    sweep_dir.mkdir(parents=True)

    tasks = [(spec, str(root)) for spec in cells]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell, tasks))
    else:
        records = [_run_cell(t) for t in tasks]

    with open(sweep_dir / "records.jsonl", "w") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    with open(sweep_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for record in records:
            writer.writerow(_csv_row(record))
    return sweep_dir, records
