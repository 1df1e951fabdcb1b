"""Seeded Monte Carlo experiment runner with CSV emission.

Every trial derives its own seeds from (master seed, sweep index, trial
index), so records are reproducible row-by-row regardless of execution
order. Output files: records.csv (one row per trial per solver),
summary.csv (aggregates with config hash and master seed in the header),
plus kind-specific artifacts such as the cooperative fusion log.
"""

import csv
import hashlib
import math
from dataclasses import dataclass, fields

import numpy as np

from .config import ExperimentConfig, config_hash
from .cooperative import (
    PENDING,
    FusionCenter,
    SecondaryUser,
    pool_and_recover,
    su_sense,
)
from .fourier import inverse_dft_matrix
from .measurement import (
    ReductionMatrix,
    SensingMatrix,
    build_reduction,
    coherence,
    compose_sensing,
    measure,
)
from .prediction import (
    OccupancyHistory,
    fit_gd,
    predict_sparsity,
    required_measurements,
)
from .recovery import (
    RecoveryProblem,
    decide_occupancy,
    design_weights,
    nmse,
    nmse_l2,
    solve_bp,
    solve_lasso,
    solve_wlasso,
    solve_wlasso_scaled,
)
from .greedy import solve_assamp, solve_cosamp, solve_omp
from .spectrum import (
    NoiseModel,
    add_time_noise,
    average_block_sparsity,
    make_block_partition,
    sample_instance,
)

RECORD_COLUMNS = (
    "experiment",
    "sweep_value",
    "trial",
    "seed",
    "solver",
    "nmse_paper",
    "nmse_l2",
    "miss",
    "false_alarm",
    "wall_time",
    "iterations",
    "converged",
    "extra",
)


@dataclass(frozen=True)
class TrialRecord:
    """One solver's outcome on one trial of one sweep point."""

    experiment: str
    sweep_value: str
    trial: int
    seed: int
    solver: str
    nmse_paper: float
    nmse_l2: float
    miss: int
    false_alarm: int
    wall_time: float
    iterations: int
    converged: bool
    extra: float = math.nan


# ---------------------------------------------------------------------------
# Seeding and per-trial plumbing


def _trial_seeds(master: int, sweep_idx: int, trial_idx: int):
    """(record seed, instance seed, matrix seed, noise seed), order-free."""
    root = np.random.SeedSequence(entropy=(master, sweep_idx, trial_idx))
    record_seed = int(root.generate_state(1)[0])
    children = root.spawn(3)
    return (record_seed,) + tuple(int(c.generate_state(1)[0]) for c in children)


def _sample_occupied(part, amplitude, seed):
    """Draw instances from one stream until at least one band is occupied."""
    gen = np.random.default_rng(seed)
    for _ in range(1000):
        inst = sample_instance(part, amplitude, seed=gen)
        if inst.k > 0:
            return inst
    raise RuntimeError("could not draw an occupied instance; are all probs zero?")


def sigma_for_snr(x, n: int, snr_db: float) -> float:
    """Noise level hitting a target measured SNR in expectation.

    The measured noise energy through any of the unit-column-energy sensing
    matrices is sigma^2 * n in expectation, so sigma follows directly.
    """
    return float(np.linalg.norm(x)) / (math.sqrt(n) * 10.0 ** (snr_db / 20.0))


def epsilon_for(sigma: float, m: int, delta: float, y) -> float:
    """Default residual budget from the expected noise norm (configurable)."""
    floor = 1e-9 * float(np.linalg.norm(y))
    return max(sigma * math.sqrt(2 * m) * (1.0 + delta), floor)


def greedy_tolerance(sigma: float, n: int, delta: float, y) -> float:
    """Residual stopping level for the pursuit solvers.

    The measured noise norm concentrates at sigma * sqrt(n), so this level is
    actually reachable; stopping there keeps the adaptive pursuits from
    growing their supports into the noise.
    """
    floor = 1e-9 * float(np.linalg.norm(y))
    return max(sigma * math.sqrt(n) * (1.0 + delta), floor)


def _default_k(kbar_total: float, m: int) -> int:
    return max(1, min(int(round(kbar_total)), m))


def _run_solver(name, cfg, psi, y, eps, part, weights, kbar_total, m, greedy_tol=None):
    if greedy_tol is None:
        greedy_tol = eps
    if name == "lasso":
        return solve_lasso(
            RecoveryProblem(psi=psi, y=y, epsilon=eps),
            max_iter=cfg.max_iter,
            tol=cfg.tol,
        )
    if name == "wlasso":
        return solve_wlasso(
            RecoveryProblem(psi=psi, y=y, epsilon=eps, weights=weights),
            part,
            max_iter=cfg.max_iter,
            tol=cfg.tol,
        )
    if name == "wlasso_scaled":
        return solve_wlasso_scaled(
            RecoveryProblem(psi=psi, y=y, epsilon=eps, weights=weights),
            part,
            max_iter=cfg.max_iter,
            tol=cfg.tol,
        )
    if name == "bp":
        return solve_bp(psi, y, max_iter=cfg.max_iter, tol=cfg.tol)
    if name == "omp":
        k_max = cfg.omp_k_max or _default_k(kbar_total, m)
        return solve_omp(psi, y, k_max=min(k_max, m), residual_tol=greedy_tol)
    if name == "cosamp":
        k = cfg.cosamp_k or _default_k(kbar_total, m)
        return solve_cosamp(psi, y, k=min(k, m), residual_tol=greedy_tol)
    if name == "assamp":
        step = cfg.assamp_step or _default_k(kbar_total, m)
        return solve_assamp(psi, y, initial_step=step, residual_tol=greedy_tol)
    raise ValueError(f"unknown solver {name!r}")


def _detection_counts(z_star, occupancy, threshold):
    detected = decide_occupancy([z_star], threshold)
    miss = int(np.count_nonzero(occupancy & ~detected))
    false_alarm = int(np.count_nonzero(~occupancy & detected))
    return miss, false_alarm


# ---------------------------------------------------------------------------
# Experiment kinds


def _recovery_sweep(cfg: ExperimentConfig) -> list[TrialRecord]:
    part = make_block_partition(cfg.n, cfg.block_sizes, cfg.block_probs)
    kbar = average_block_sparsity(part)
    weights = design_weights(kbar)
    kbar_total = float(kbar.sum())
    records = []
    for sweep_idx, sval in enumerate(cfg.sweep):
        if cfg.kind == "error_gain_vs_m":
            m, snr_db, mat_kind = int(sval), cfg.snr_db, cfg.matrix_kind
        elif cfg.kind == "coherence_study":
            m, snr_db, mat_kind = cfg.m, cfg.snr_db, str(sval)
        else:  # nmse_vs_snr
            m, snr_db, mat_kind = cfg.m, float(sval), cfg.matrix_kind
        for trial in range(cfg.trials):
            rec_seed, inst_seed, mat_seed, noise_seed = _trial_seeds(
                cfg.master_seed, sweep_idx, trial
            )
            inst = _sample_occupied(part, cfg.amplitude, inst_seed)
            phi = build_reduction(mat_kind, m, cfg.n, seed=mat_seed)
            psi = compose_sensing(phi)
            if cfg.kind == "coherence_study":
                records.append(
                    TrialRecord(
                        experiment=cfg.kind,
                        sweep_value=str(sval),
                        trial=trial,
                        seed=rec_seed,
                        solver="coherence",
                        nmse_paper=math.nan,
                        nmse_l2=math.nan,
                        miss=0,
                        false_alarm=0,
                        wall_time=0.0,
                        iterations=0,
                        converged=True,
                        extra=coherence(psi),
                    )
                )
            sigma = sigma_for_snr(inst.x, cfg.n, snr_db)
            noisy = add_time_noise(inst.r, NoiseModel(sigma), seed=noise_seed)
            y = measure(phi, noisy)
            eps = epsilon_for(sigma, m, cfg.eps_delta, y)
            gtol = greedy_tolerance(sigma, cfg.n, cfg.eps_delta, y)
            for solver in cfg.solvers:
                result = _run_solver(
                    solver, cfg, psi, y, eps, part, weights, kbar_total, m, gtol
                )
                miss, fa = _detection_counts(
                    result.z_star, inst.occupancy, cfg.energy_threshold
                )
                records.append(
                    TrialRecord(
                        experiment=cfg.kind,
                        sweep_value=str(sval),
                        trial=trial,
                        seed=rec_seed,
                        solver=solver,
                        nmse_paper=nmse(result.z_star, inst.x),
                        nmse_l2=nmse_l2(result.z_star, inst.x),
                        miss=miss,
                        false_alarm=fa,
                        wall_time=result.wall_time,
                        iterations=result.iterations,
                        converged=result.converged,
                    )
                )
    return records


def _timing_records(cfg: ExperimentConfig) -> list[TrialRecord]:
    inner = ExperimentConfig(**{
        **{f.name: getattr(cfg, f.name) for f in fields(ExperimentConfig)},
        "kind": "nmse_vs_snr",
        "sweep": (repr(cfg.snr_db),),
    })
    records = _recovery_sweep(inner)
    return [
        TrialRecord(**{**_record_dict(r), "experiment": "timing_table", "sweep_value": "timing"})
        for r in records
    ]


def timing_table(cfg: ExperimentConfig):
    """Matched-instance timing benchmark: per-solver means plus order checks.

    Returns (records, table rows, checks). Checks report whether the greedy
    solvers order as expected by cost and whether the weighted and plain l1
    runs take comparable time.
    """
    if not cfg.solvers:
        raise ValueError("timing_table needs at least one solver")
    records = _timing_records(cfg)
    by_solver: dict[str, list[TrialRecord]] = {}
    for rec in records:
        by_solver.setdefault(rec.solver, []).append(rec)
    table = [
        {
            "solver": name,
            "trials": len(rows),
            "mean_time": float(np.mean([r.wall_time for r in rows])),
            "mean_iterations": float(np.mean([r.iterations for r in rows])),
        }
        for name, rows in by_solver.items()
    ]
    mean_time = {row["solver"]: row["mean_time"] for row in table}
    checks = {}
    if "omp" in mean_time and "cosamp" in mean_time:
        checks["omp_faster_than_cosamp"] = mean_time["omp"] < mean_time["cosamp"]
    if "cosamp" in mean_time and "lasso" in mean_time:
        checks["cosamp_faster_than_lasso"] = mean_time["cosamp"] < mean_time["lasso"]
    if "wlasso" in mean_time and "lasso" in mean_time:
        ratio = mean_time["wlasso"] / mean_time["lasso"]
        checks["wlasso_lasso_time_ratio"] = ratio
        checks["time_parity"] = 1.0 / 1.5 <= ratio <= 1.5
    return records, table, checks


def _miss_cdf(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Drifting occupancy: forecast-driven budget vs a stale fixed budget."""
    probs_start = np.asarray(cfg.block_probs, dtype=float)
    if cfg.drift_probs_end:
        probs_end = np.asarray(cfg.drift_probs_end, dtype=float)
    else:
        probs_end = np.minimum(probs_start * 3.0, 0.9)
    T = cfg.trials
    if T <= cfg.lag + 1:
        raise ValueError(f"need more windows than lag+1={cfg.lag + 1}, got {T}")
    kbar0 = np.array(
        [p * s for p, s in zip(probs_start, cfg.block_sizes)], dtype=float
    )
    k0 = float(np.clip(kbar0.sum(), 1.0, cfg.n - 1))
    m_stale = required_measurements(k0, cfg.n, cfg.m_rule_c)
    w_stale = design_weights(kbar0)

    records = []
    history_rows: list[np.ndarray] = []
    for t in range(T):
        frac = t / (T - 1)
        probs_t = (1 - frac) * probs_start + frac * probs_end
        part_t = make_block_partition(cfg.n, cfg.block_sizes, tuple(probs_t))
        rec_seed, inst_seed, mat_seed, noise_seed = _trial_seeds(cfg.master_seed, 0, t)
        inst = _sample_occupied(part_t, cfg.amplitude, inst_seed)
        sigma = sigma_for_snr(inst.x, cfg.n, cfg.snr_db)
        noisy = add_time_noise(inst.r, NoiseModel(sigma), seed=noise_seed)

        if len(history_rows) > cfg.lag:
            history = OccupancyHistory(
                counts=np.stack(history_rows), block_sizes=cfg.block_sizes
            )
            predictor = fit_gd(history, lag=cfg.lag)
            recent = np.stack(history_rows[-cfg.lag:]).T
            k_hat = predict_sparsity(predictor, recent)
            m_pred = required_measurements(
                float(np.clip(k_hat.sum(), 1.0, cfg.n - 1)), cfg.n, cfg.m_rule_c
            )
            w_pred = design_weights(k_hat)
        else:
            m_pred, w_pred = m_stale, w_stale

        for arm, m_arm, w_arm in (
            ("predicted_m", m_pred, w_pred),
            ("stale_m", m_stale, w_stale),
        ):
            phi = build_reduction(cfg.matrix_kind, m_arm, cfg.n, seed=mat_seed)
            psi = compose_sensing(phi)
            y = measure(phi, noisy)
            eps = epsilon_for(sigma, m_arm, cfg.eps_delta, y)
            result = solve_wlasso(
                RecoveryProblem(psi=psi, y=y, epsilon=eps, weights=w_arm),
                part_t,
                max_iter=cfg.max_iter,
                tol=cfg.tol,
            )
            miss, fa = _detection_counts(
                result.z_star, inst.occupancy, cfg.energy_threshold
            )
            records.append(
                TrialRecord(
                    experiment=cfg.kind,
                    sweep_value="drift",
                    trial=t,
                    seed=rec_seed,
                    solver=arm,
                    nmse_paper=nmse(result.z_star, inst.x),
                    nmse_l2=nmse_l2(result.z_star, inst.x),
                    miss=miss,
                    false_alarm=fa,
                    wall_time=result.wall_time,
                    iterations=result.iterations,
                    converged=result.converged,
                    extra=float(m_arm),
                )
            )
        block_counts = np.array(
            [np.count_nonzero(inst.occupancy[s]) for s in part_t.block_slices()],
            dtype=float,
        )
        history_rows.append(block_counts)
    return records


def _decision_hash(decision: np.ndarray) -> str:
    return hashlib.sha256(decision.astype(np.uint8).tobytes()).hexdigest()[:12]


def _su_local_recovery(contribution, part, weights, eps, cfg):
    rows = contribution.pn_rows.shape[0]
    scale = 1.0 / math.sqrt(rows)
    phi = ReductionMatrix(
        kind="bernoulli", m=rows, n=part.n, entries=contribution.pn_rows * scale, seed=None
    )
    psi = SensingMatrix(psi=phi.entries @ inverse_dft_matrix(part.n), provenance=phi)
    problem = RecoveryProblem(
        psi=psi, y=contribution.values * scale, epsilon=eps, weights=weights
    )
    return solve_wlasso(problem, part, max_iter=cfg.max_iter, tol=cfg.tol)


def _cooperative(cfg: ExperimentConfig):
    part = make_block_partition(cfg.n, cfg.block_sizes, cfg.block_probs)
    kbar = average_block_sparsity(part)
    weights = design_weights(kbar)
    sus = []
    for j in range(cfg.su_count):
        gains = np.ones(cfg.n)
        if j == cfg.shadow_su and 0 <= cfg.shadow_band < cfg.n:
            gains[cfg.shadow_band] = 10.0 ** (-cfg.shadow_db / 10.0)
        su_seed = int(
            np.random.SeedSequence(entropy=(cfg.master_seed, 777, j)).generate_state(1)[0]
        )
        sus.append(
            SecondaryUser(
                su_id=j,
                branches=cfg.su_branches,
                scans=cfg.su_scans,
                channel_gains=gains,
                seed=su_seed,
            )
        )

    records = []
    log_lines = ["round,su_id,rows_contributed,decision_hash"]
    for t in range(cfg.trials):
        rec_seed, inst_seed, _, noise_base = _trial_seeds(cfg.master_seed, 0, t)
        inst = _sample_occupied(part, cfg.amplitude, inst_seed)
        sigma = sigma_for_snr(inst.x, cfg.n, cfg.snr_db)
        noise = NoiseModel(sigma)
        contributions = [
            su_sense(su, inst, noise, noise_seed=(noise_base + j) % (2**63))
            for j, su in enumerate(sus)
        ]

        if cfg.fusion_mode == "pool":
            fc = FusionCenter(target_m=cfg.m, quorum=cfg.quorum)
            total_rows = sum(c.pn_rows.shape[0] for c in contributions)
            eps = epsilon_for(sigma, max(total_rows, cfg.m), cfg.eps_delta, inst.x)
            outcome = pool_and_recover(fc, contributions, part, weights, eps)
            if outcome == PENDING:
                records.append(
                    TrialRecord(
                        experiment=cfg.kind,
                        sweep_value="round",
                        trial=t,
                        seed=rec_seed,
                        solver="fused",
                        nmse_paper=math.nan,
                        nmse_l2=math.nan,
                        miss=inst.k,
                        false_alarm=0,
                        wall_time=0.0,
                        iterations=0,
                        converged=False,
                    )
                )
                fused = np.zeros(cfg.n, dtype=bool)
            else:
                fused = decide_occupancy([outcome.z_star], cfg.energy_threshold)
                miss, fa = _detection_counts(
                    outcome.z_star, inst.occupancy, cfg.energy_threshold
                )
                records.append(
                    TrialRecord(
                        experiment=cfg.kind,
                        sweep_value="round",
                        trial=t,
                        seed=rec_seed,
                        solver="fused",
                        nmse_paper=nmse(outcome.z_star, inst.x),
                        nmse_l2=nmse_l2(outcome.z_star, inst.x),
                        miss=miss,
                        false_alarm=fa,
                        wall_time=outcome.wall_time,
                        iterations=outcome.iterations,
                        converged=outcome.converged,
                    )
                )
            for c in contributions:
                log_lines.append(
                    f"{t},{c.su_id},{c.pn_rows.shape[0]},{_decision_hash(fused)}"
                )
        else:  # vote
            locals_occ = []
            for c in contributions:
                rows = c.pn_rows.shape[0]
                eps = epsilon_for(sigma, rows, cfg.eps_delta, c.values / math.sqrt(rows))
                result = _su_local_recovery(c, part, weights, eps, cfg)
                occ = decide_occupancy([result.z_star], cfg.energy_threshold)
                locals_occ.append(occ)
                miss, fa = _detection_counts(
                    result.z_star, inst.occupancy, cfg.energy_threshold
                )
                records.append(
                    TrialRecord(
                        experiment=cfg.kind,
                        sweep_value="round",
                        trial=t,
                        seed=rec_seed,
                        solver=f"su{c.su_id}",
                        nmse_paper=nmse(result.z_star, inst.x),
                        nmse_l2=nmse_l2(result.z_star, inst.x),
                        miss=miss,
                        false_alarm=fa,
                        wall_time=result.wall_time,
                        iterations=result.iterations,
                        converged=result.converged,
                    )
                )
                log_lines.append(
                    f"{t},{c.su_id},{rows},{_decision_hash(occ)}"
                )
            fused = np.stack(locals_occ).mean(axis=0) >= cfg.quorum
            miss = int(np.count_nonzero(inst.occupancy & ~fused))
            fa = int(np.count_nonzero(~inst.occupancy & fused))
            records.append(
                TrialRecord(
                    experiment=cfg.kind,
                    sweep_value="round",
                    trial=t,
                    seed=rec_seed,
                    solver="fused",
                    nmse_paper=math.nan,
                    nmse_l2=math.nan,
                    miss=miss,
                    false_alarm=fa,
                    wall_time=0.0,
                    iterations=0,
                    converged=True,
                )
            )
    return records, {"fusion_log.csv": log_lines}


def run_experiment(cfg: ExperimentConfig):
    """Run the configured experiment; returns (records, summary, artifacts)."""
    artifacts: dict[str, list[str]] = {}
    if cfg.kind in ("nmse_vs_snr", "error_gain_vs_m", "coherence_study"):
        records = _recovery_sweep(cfg)
        if cfg.kind == "error_gain_vs_m" and "wlasso" in cfg.solvers:
            artifacts["error_gain.csv"] = _gain_lines(records)
    elif cfg.kind == "timing_table":
        records, _, _ = timing_table(cfg)
    elif cfg.kind == "miss_detect_cdf":
        records = _miss_cdf(cfg)
    elif cfg.kind == "cooperative_round":
        records, artifacts = _cooperative(cfg)
    else:
        raise ValueError(f"unknown experiment kind {cfg.kind!r}")
    return records, summarize(records), artifacts


def _gain_lines(records) -> list[str]:
    """Per-sweep mean error gain of the weighted solver over each other one."""
    by_key: dict[tuple[str, str], dict[int, float]] = {}
    for rec in records:
        by_key.setdefault((rec.sweep_value, rec.solver), {})[rec.trial] = rec.nmse_l2
    lines = ["sweep_value,solver,mean_gain,se_gain,trials"]
    sweeps = sorted({k[0] for k in by_key}, key=float)
    solvers = sorted({k[1] for k in by_key})
    for sval in sweeps:
        wl = by_key.get((sval, "wlasso"), {})
        for solver in solvers:
            if solver == "wlasso":
                continue
            other = by_key.get((sval, solver), {})
            gains = [
                (other[t] - wl[t]) / other[t]
                for t in other
                if t in wl and other[t] > 0
            ]
            if not gains:
                continue
            mean = float(np.mean(gains))
            se = float(np.std(gains, ddof=1) / math.sqrt(len(gains))) if len(gains) > 1 else 0.0
            lines.append(f"{sval},{solver},{mean!r},{se!r},{len(gains)}")
    return lines


# ---------------------------------------------------------------------------
# CSV emission


def _record_dict(rec: TrialRecord) -> dict:
    return {f.name: getattr(rec, f.name) for f in fields(TrialRecord)}


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records, path):
    """Write records with the fixed column header; floats round-trip exactly."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            row = _record_dict(rec)
            writer.writerow([_format_cell(row[col]) for col in RECORD_COLUMNS])


def parse_records(path) -> list:
    """Read back a records.csv written by emit_csv."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TrialRecord(
                    experiment=row["experiment"],
                    sweep_value=row["sweep_value"],
                    trial=int(row["trial"]),
                    seed=int(row["seed"]),
                    solver=row["solver"],
                    nmse_paper=float(row["nmse_paper"]),
                    nmse_l2=float(row["nmse_l2"]),
                    miss=int(row["miss"]),
                    false_alarm=int(row["false_alarm"]),
                    wall_time=float(row["wall_time"]),
                    iterations=int(row["iterations"]),
                    converged=row["converged"] == "1",
                    extra=float(row["extra"]),
                )
            )
    return out


SUMMARY_COLUMNS = (
    "sweep_value",
    "solver",
    "trials",
    "mean_nmse_paper",
    "se_nmse_paper",
    "mean_nmse_l2",
    "se_nmse_l2",
    "mean_miss",
    "median_miss",
    "mean_false_alarm",
    "mean_wall_time",
    "mean_iterations",
    "converged_rate",
)


def _mean_se(values):
    vals = [v for v in values if not math.isnan(v)]
    if not vals:
        return math.nan, math.nan
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, se


def summarize(records) -> list[dict]:
    """Per (sweep value, solver) aggregate rows."""
    groups: dict[tuple[str, str], list[TrialRecord]] = {}
    order: list[tuple[str, str]] = []
    for rec in records:
        key = (rec.sweep_value, rec.solver)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    rows = []
    for key in order:
        rows_for = groups[key]
        mean_p, se_p = _mean_se([r.nmse_paper for r in rows_for])
        mean_l2, se_l2 = _mean_se([r.nmse_l2 for r in rows_for])
        rows.append(
            {
                "sweep_value": key[0],
                "solver": key[1],
                "trials": len(rows_for),
                "mean_nmse_paper": mean_p,
                "se_nmse_paper": se_p,
                "mean_nmse_l2": mean_l2,
                "se_nmse_l2": se_l2,
                "mean_miss": float(np.mean([r.miss for r in rows_for])),
                "median_miss": float(np.median([r.miss for r in rows_for])),
                "mean_false_alarm": float(np.mean([r.false_alarm for r in rows_for])),
                "mean_wall_time": float(np.mean([r.wall_time for r in rows_for])),
                "mean_iterations": float(np.mean([r.iterations for r in rows_for])),
                "converged_rate": float(np.mean([r.converged for r in rows_for])),
            }
        )
    return rows


def emit_summary(records, path, cfg: ExperimentConfig):
    """Write aggregate rows with provenance (config hash, master seed)."""
    rows = summarize(records)
    if not rows:
        raise ValueError("no records to summarize")
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={config_hash(cfg)}\n")
        fh.write(f"# master_seed={cfg.master_seed}\n")
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[col]) for col in SUMMARY_COLUMNS])
