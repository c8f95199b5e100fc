"""Seeded Monte-Carlo experiments over hidden oracles.

Each (oracle id, trial) pair gets its own generator derived from the master
seed, so results do not depend on worker count, run order, or how many
other trials were requested.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algorithms as alg
from . import oracle_set as osets
from .bounds import simple_adversary_bound
from .quantum_sim import HiddenOracle

ALGORITHMS = (
    "identify_general",
    "identify_square",
    "identify_av",
    "identify_balanced",
    "identify_hybrid",
    "classical_identify_hybrid",
)
HYBRID_ALGORITHMS = ("identify_hybrid", "classical_identify_hybrid")
_SAMPLE_KEY = 2**31 - 1


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    matrix: osets.OracleMatrix
    trials: int = 1
    oracles: str = "all"  # "all" or "sample:<count>"
    seed: int = 0
    constants: dict = field(default_factory=dict)
    hybrid_k: int | None = None
    source: str = ""

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        try:
            alg.Constants.with_overrides(self.constants)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        self.selected_oracles()
        Z = self.matrix
        if self.algorithm in HYBRID_ALGORITHMS:
            k = self.hybrid_k if self.hybrid_k is not None else Z.meta.get("k")
            if k is None:
                raise ConfigError(f"{self.algorithm} needs a hybrid matrix; pass --k to declare one")
            if not 0 <= k <= Z.n or not np.array_equal(Z.rows, osets.make_hybrid(Z.n, k).rows):
                raise ConfigError(f"{self.algorithm} requires the hybrid matrix H(k={k}) with n={Z.n}")
            self.hybrid_k = k
        elif self.algorithm == "identify_general" and Z.M < 2:
            raise ConfigError("identify_general needs at least two oracles")
        elif self.algorithm in ("identify_av", "identify_balanced") and Z.M != Z.N:
            raise ConfigError(f"{self.algorithm} expects an N x N matrix")

    def selected_oracles(self) -> list[int]:
        M = self.matrix.M
        if self.oracles == "all":
            return list(range(M))
        if self.oracles.startswith("sample:"):
            try:
                count = int(self.oracles.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad oracle selection {self.oracles!r}") from None
            if not 1 <= count <= M:
                raise ConfigError(f"sample count must be in [1, {M}]")
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(_SAMPLE_KEY,))))
            return sorted(rng.choice(M, size=count, replace=False).tolist())
        raise ConfigError(f"bad oracle selection {self.oracles!r}; use 'all' or 'sample:<count>'")


def trial_rng(master: int, oracle_id: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master, spawn_key=(oracle_id, trial))))


def run_trial(algorithm: str, S: osets.OracleMatrix, oracle_id: int, trial: int, seed: int,
              consts: alg.Constants, hybrid_k: int | None = None) -> dict:
    rng = trial_rng(seed, oracle_id, trial)
    oracle = HiddenOracle(S.rows[oracle_id])
    if algorithm == "identify_general":
        tr = alg.identify_general(S, oracle, rng, consts)
    elif algorithm == "identify_square":
        tr = alg.identify_square(S, oracle, rng, consts)
    elif algorithm == "identify_av":
        tr = alg.identify_av(S, oracle, None, rng, consts, K=S.meta.get("K"))
    elif algorithm == "identify_balanced":
        tr = alg.identify_balanced(S, oracle, rng, consts)
    elif algorithm == "identify_hybrid":
        tr = alg.identify_hybrid(S.n, hybrid_k, oracle, rng, consts)
    elif algorithm == "classical_identify_hybrid":
        tr = alg.classical_identify_hybrid(S.n, hybrid_k, oracle)
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    if tr.total_queries != oracle.counter:
        raise AssertionError("transcript query count disagrees with the oracle counter")
    record = tr.to_dict()
    record.update(seed=seed, oracle=int(oracle_id), trial=int(trial), N=S.N)
    record["success"] = tr.outcome is not None and tr.outcome == int(S.row_ids[oracle_id])
    return record


def _run_chunk(args):
    algorithm, S, jobs, seed, consts, hybrid_k = args
    return [run_trial(algorithm, S, o, t, seed, consts, hybrid_k) for o, t in jobs]


def worker_count() -> int:
    cap = os.environ.get("ORACLID_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"ORACLID_THREADS must be an integer, got {cap!r}") from None
    return n


def run_experiment(config: ExperimentConfig, workers: int | None = None):
    """Run every selected (oracle, trial) and return (summary, records)."""
    config.validate()
    consts = alg.Constants.with_overrides(config.constants)
    jobs = [(o, t) for o in config.selected_oracles() for t in range(config.trials)]
    workers = worker_count() if workers is None else workers
    args = (config.algorithm, config.matrix, None, config.seed, consts, config.hybrid_k)
    if workers <= 1 or len(jobs) < 2 * workers:
        records = _run_chunk(args[:2] + (jobs,) + args[3:])
    else:
        size = math.ceil(len(jobs) / (4 * workers))
        chunks = [jobs[i:i + size] for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [args[:2] + (c,) + args[3:] for c in chunks])
            records = [r for part in parts for r in part]
    records.sort(key=lambda r: (r["oracle"], r["trial"]))
    return summarize(config, consts, records), records


def _stats(values) -> dict:
    if not values:
        return {"count": 0, "mean": None, "max": None, "p95": None}
    arr = np.asarray(values, dtype=np.float64)
    return {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "max": int(arr.max()),
        "p95": float(np.percentile(arr, 95)),
    }


def summarize(config: ExperimentConfig, consts: alg.Constants, records: list[dict]) -> dict:
    S = config.matrix
    runs = len(records)
    ok = [r for r in records if r["success"]]
    failures: dict[str, int] = {}
    for r in records:
        if not r["success"]:
            reason = r["failure"] or "wrong-answer"
            failures[reason] = failures.get(reason, 0) + 1
    bound = simple_adversary_bound(S) if S.M >= 2 else None
    all_q = _stats([r["total_queries"] for r in records])
    ok_q = _stats([r["total_queries"] for r in ok])
    summary = {
        "algorithm": config.algorithm,
        "source": config.source,
        "n": S.n,
        "N": S.N,
        "M": S.M,
        "seed": config.seed,
        "trials": config.trials,
        "oracles": config.oracles,
        "oracles_run": len({r["oracle"] for r in records}),
        "runs": runs,
        "successes": len(ok),
        "success_rate": len(ok) / runs if runs else 0.0,
        "failures": dict(sorted(failures.items())),
        "queries_all": all_q,
        "queries_success": ok_q,
        "constants": consts.__dict__.copy(),
        "lower_bound": bound.to_dict() if bound else None,
    }
    if bound and ok_q["mean"] is not None:
        summary["bound_ratio"] = ok_q["mean"] / bound.value
        summary["bound_sandwich_ok"] = ok_q["mean"] >= bound.value
    return summary


def per_oracle_rows(records: list[dict]) -> list[dict]:
    by: dict[int, list[dict]] = {}
    for r in records:
        by.setdefault(r["oracle"], []).append(r)
    rows = []
    for oid in sorted(by):
        rs = by[oid]
        q = [r["total_queries"] for r in rs]
        succ = sum(r["success"] for r in rs)
        rows.append({
            "oracle": oid,
            "trials": len(rs),
            "successes": succ,
            "success_rate": succ / len(rs),
            "mean_queries": sum(q) / len(q),
            "max_queries": max(q),
        })
    return rows


def dumps_transcripts(records) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def dumps_summary(summary) -> str:
    return json.dumps(summary, sort_keys=True, indent=2) + "\n"


def dumps_csv(records) -> str:
    buf = io.StringIO()
    rows = per_oracle_rows(records)
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["oracle"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
