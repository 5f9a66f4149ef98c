"""Parameter sweeps over synthetic BA graphs.

A plan varies one axis (node count, relation count or sparsity) over a grid;
each (value, seed) point generates one multi-relational graph and evaluates
every requested objective on it: the 1D value, the minimized 2D value and the
decoded fraction. Points are independent and may run in a process pool; rows
always come back ordered by (grid position, seed, objective).
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

from .entropy import OBJECTIVES, decoded_fraction
from .errors import InputError
from .minimize import MinimizeConfig, minimize
from .synth import SynthConfig, generate_multi_ba, substream

__all__ = ["ExperimentPlan", "EXPERIMENT_COLUMNS", "point_seed", "run_point", "run_plan"]

log = logging.getLogger(__name__)

AXES = {"size": "node_count", "relations": "relation_count", "sparsity": "sparsity"}

EXPERIMENT_COLUMNS = ("axis", "value", "seed", "objective", "nodes", "relations",
                      "sparsity", "one_d", "min_two_d", "decoded_fraction", "merges",
                      "wall_time", "status")


@dataclass(frozen=True)
class ExperimentPlan:
    axis: str
    grid: tuple
    seeds: int = 5
    objectives: tuple = OBJECTIVES
    template: SynthConfig = SynthConfig(node_count=300, m=3, relation_count=3)
    minimize: MinimizeConfig = MinimizeConfig()
    seed: int = 0
    timing: bool = True

    def __post_init__(self):
        if self.axis not in AXES:
            raise InputError(f"unknown sweep axis {self.axis!r}; expected one of {sorted(AXES)}")
        if not self.grid:
            raise InputError("empty sweep grid")
        if self.seeds < 1:
            raise InputError("need at least one seed per point")
        bad = [o for o in self.objectives if o not in OBJECTIVES]
        if bad or not self.objectives:
            raise InputError(f"unknown objectives {bad}")
        for v in self.grid:
            self.point_config(v, 0)

    def point_config(self, value, seed_index) -> SynthConfig:
        field = AXES[self.axis]
        value = float(value) if field == "sparsity" else int(value)
        return replace(self.template, **{field: value},
                       seed=point_seed(self.seed, seed_index))

    def describe(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["objectives"] = list(self.objectives)
        return d


def point_seed(base: int, seed_index: int) -> int:
    """Graph seed of the ``seed_index``-th replicate; shared across grid values."""
    return int(substream(base, "replicate", seed_index).integers(2 ** 31))


def run_point(cfg: SynthConfig, objectives, mcfg: MinimizeConfig, timing=True):
    """Rows ``(objective, one_d, min_two_d, decoded, merges, wall, status)`` for one graph."""
    try:
        g = generate_multi_ba(cfg)
    except Exception as exc:  # recorded per row, the sweep continues
        return [(o, None, None, None, None, None, f"error: {exc}") for o in objectives]
    rows = []
    for obj in objectives:
        start = time.perf_counter()
        try:
            res = minimize(g, replace(mcfg, objective=obj))
            merges = len(res.trace) if hasattr(res, "trace") else sum(p.merges for p in res.passes)
            frac = decoded_fraction(res.one_d, res.objective)
            wall = time.perf_counter() - start if timing else None
            rows.append((obj, res.one_d, res.objective, frac, merges, wall, "ok"))
        except Exception as exc:
            log.warning("%s failed on %s: %s", obj, cfg, exc)
            rows.append((obj, None, None, None, None, None, f"error: {exc}"))
    return rows


def _task(args):
    plan, gi, si = args
    cfg = plan.point_config(plan.grid[gi], si)
    return gi, si, cfg, run_point(cfg, plan.objectives, plan.minimize, plan.timing)


def run_plan(plan: ExperimentPlan, threads: int = 1):
    """Evaluate every point of ``plan``; returns rows matching ``EXPERIMENT_COLUMNS``."""
    tasks = [(plan, gi, si) for gi in range(len(plan.grid)) for si in range(plan.seeds)]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    out = []
    for gi, si, cfg, rows in results:
        for row in rows:
            obj, one_d, two_d, frac, merges, wall, status = row
            out.append((plan.axis, plan.grid[gi], si, obj, cfg.node_count, cfg.relation_count,
                        cfg.sparsity, one_d, two_d, frac, merges, wall, status))
    return out
