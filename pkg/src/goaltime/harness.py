"""Batch experiments: simulated players, error metrics, and policy tables.

Players are synthetic stand-ins for humans with known time curves plus
lognormal noise. The harness plays every (player, policy) pairing end to
end, buckets completion times by iteration, and reports the mean absolute
error to the goal with Welch t-tests of each baseline against the flagship
policy arm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .engine import (
    Domain,
    Observation,
    PolicyConfig,
    SessionState,
    new_session,
    next_content,
    record_result,
    roguelike_domain,
    sudoku_domain,
)
from .gp import GpModel, Kernel, PriorMean, fit, optimize_hyperparameters
from .space import DesignPoint, DesignSpace

SUDOKU_CUTOFF_SECONDS = 3000.0
ROGUELIKE_CUTOFF_SECONDS = 60.0

Bucket = tuple[str, int, int]  # label, first iteration, one past last


# ---------------------------------------------------------------------------
# Simulated players
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SudokuSim:
    """log t = a + b * (80 - hints) + Normal(0, noise_sigma^2)."""

    a: float
    b: float
    noise_sigma: float = 0.25

    def __post_init__(self) -> None:
        if self.b < 0 or self.noise_sigma < 0:
            raise ValueError("slope and noise must be nonnegative")

    def mean_log_time(self, point: DesignPoint) -> float:
        return self.a + self.b * (80.0 - point[0])

    def play(self, point: DesignPoint, rng: np.random.Generator | None = None) -> float:
        eps = rng.normal(0.0, self.noise_sigma) if rng is not None and self.noise_sigma else 0.0
        return math.exp(self.mean_log_time(point) + eps)


@dataclass(frozen=True)
class RoguelikeSim:
    """log t = log(base + c_l * l + c_r * (r)) + Normal(0, noise_sigma^2)."""

    base: float
    c_l: float
    c_r: float
    noise_sigma: float = 0.3

    def __post_init__(self) -> None:
        if min(self.base, self.c_l, self.c_r, self.noise_sigma) < 0:
            raise ValueError("parameters must be nonnegative")

    def mean_log_time(self, point: DesignPoint) -> float:
        return math.log(self.base + self.c_l * point[0] + self.c_r * point[1])

    def play(self, point: DesignPoint, rng: np.random.Generator | None = None) -> float:
        eps = rng.normal(0.0, self.noise_sigma) if rng is not None and self.noise_sigma else 0.0
        return math.exp(self.mean_log_time(point) + eps)


SimPlayer = SudokuSim | RoguelikeSim


def sample_sudoku_players(
    n: int, rng: np.random.Generator, noise_sigma: float = 0.25
) -> list[SudokuSim]:
    """Population with goal-time content strictly inside {17..80}."""
    return [
        SudokuSim(
            a=float(rng.normal(math.log(20.0), 0.3)),
            b=float(rng.uniform(0.05, 0.12)),
            noise_sigma=noise_sigma,
        )
        for _ in range(n)
    ]


def sample_roguelike_players(
    n: int, rng: np.random.Generator, noise_sigma: float = 0.3
) -> list[RoguelikeSim]:
    """Population whose 10 s region lies inside l in [0,24], r in [4,50]."""
    return [
        RoguelikeSim(
            base=float(rng.uniform(0.5, 1.5)),
            c_l=float(rng.uniform(0.15, 0.45)),
            c_r=float(rng.uniform(0.1, 0.25)),
            noise_sigma=noise_sigma,
        )
        for _ in range(n)
    ]


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def mae(times: list[float], goal_seconds: float) -> float:
    """Mean absolute distance of completion times from the goal."""
    if not times:
        raise ValueError("no times")
    return float(np.mean(np.abs(np.asarray(times, dtype=float) - goal_seconds)))


def welch_t_test(a: list[float], b: list[float]) -> tuple[float, float, float]:
    """Two-tailed t-test without the equal-variance assumption.

    Returns (t, degrees of freedom, p). The p-value comes from the exact
    Student-t tail via the regularized incomplete beta function, not a
    normal approximation.
    """
    if len(a) < 2 or len(b) < 2:
        raise ValueError("both samples need at least two values")
    xa, xb = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    va, vb = xa.var(ddof=1), xb.var(ddof=1)
    if va == 0 and vb == 0:
        raise ValueError("both samples are degenerate (zero variance)")
    sa, sb = va / len(xa), vb / len(xb)
    t = float((xa.mean() - xb.mean()) / math.sqrt(sa + sb))
    dof = float((sa + sb) ** 2 / (sa**2 / (len(xa) - 1) + sb**2 / (len(xb) - 1)))
    p = float(betainc(dof / 2.0, 0.5, dof / (dof + t * t))) if t != 0 else 1.0
    return t, dof, p


# ---------------------------------------------------------------------------
# Experiment runner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlayRecord:
    player: int
    policy: str
    iteration: int  # 1-based
    design_point: DesignPoint
    elapsed: float
    solved: bool


def filter_outliers(records: list[PlayRecord], domain: str) -> list[PlayRecord]:
    """Drop unsolved plays and times above the per-domain cutoff."""
    cutoff = SUDOKU_CUTOFF_SECONDS if domain == "sudoku" else ROGUELIKE_CUTOFF_SECONDS
    return [rec for rec in records if rec.solved and rec.elapsed <= cutoff]


def iteration_buckets(domain: str, iterations: int) -> list[Bucket]:
    if domain == "sudoku":
        return [(str(i), i, i + 1) for i in range(1, min(iterations, 8) + 1)]
    buckets = []
    for lo in (1, 5, 10, 15, 20, 25, 30):
        hi = 5 if lo == 1 else lo + 5
        if lo > iterations:
            break
        buckets.append((f"{lo} <= i < {hi}", lo, hi))
    return buckets


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str
    policies: tuple[str, ...]
    n_players: int
    iterations: int
    seed: int
    goal_seconds: float | None = None
    cutoff_seconds: float | None = None
    noise_sigma: float | None = None
    corpus_seed: int = 7

    def __post_init__(self) -> None:
        if self.domain not in ("sudoku", "roguelike"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if not self.policies or self.n_players < 1 or self.iterations < 1:
            raise ValueError("need at least one policy, player, and iteration")


def parse_config(text: str) -> ExperimentConfig:
    """Flat key = value lines; '#' starts a comment."""
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        fields[key] = value
    try:
        return ExperimentConfig(
            domain=fields["domain"],
            policies=tuple(p.strip() for p in fields["policies"].split(",") if p.strip()),
            n_players=int(fields["n_players"]),
            iterations=int(fields["iterations"]),
            seed=int(fields["seed"]),
            goal_seconds=float(fields["goal_seconds"]) if "goal_seconds" in fields else None,
            cutoff_seconds=float(fields["cutoff_seconds"]) if "cutoff_seconds" in fields else None,
            noise_sigma=float(fields["noise_sigma"]) if "noise_sigma" in fields else None,
            corpus_seed=int(fields.get("corpus_seed", "7")),
        )
    except KeyError as missing:
        raise ValueError(f"config is missing key {missing}") from None


@dataclass(frozen=True)
class MaeRow:
    bucket: str
    policy: str
    mae_seconds: float
    std_seconds: float
    n: int


@dataclass(frozen=True)
class WelchRow:
    bucket: str
    policy: str  # baseline arm compared against the flagship arm
    t: float
    dof: float
    p: float
    rejected: bool  # at the 0.05 level


@dataclass(frozen=True)
class MaeReport:
    domain: str
    goal_seconds: float
    rows: tuple[MaeRow, ...]
    welch: tuple[WelchRow, ...]
    records: tuple[PlayRecord, ...] = field(repr=False, default=())


def _arm_labels(policies: tuple[str, ...]) -> list[str]:
    """Unique report labels; repeated policies get a #k suffix so the same
    policy can occupy both arms (calibration experiments)."""
    labels = []
    for i, name in enumerate(policies):
        labels.append(name if policies.count(name) == 1 else f"{name}#{policies[:i].count(name) + 1}")
    return labels


def _play_session(
    domain: Domain,
    policy: str,
    label: str,
    player: SimPlayer,
    player_index: int,
    iterations: int,
    seed: int,
    policy_index: int,
) -> list[PlayRecord]:
    session = new_session(
        session_id=f"{label}-{player_index}",
        domain=domain,
        policy=PolicyConfig(kind=policy),
        seed=int(
            np.random.SeedSequence([seed, policy_index, player_index]).generate_state(1)[0]
        ),
    )
    noise_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([seed, policy_index, player_index, 99]))
    )
    records = []
    for i in range(1, iterations + 1):
        point = next_content(session)
        elapsed = player.play(point, noise_rng)
        record_result(
            session,
            Observation(
                design_point=point,
                content_id=f"{session.session_id}:{len(session.history)}",
                elapsed=elapsed,
                solved=True,
            ),
        )
        records.append(PlayRecord(player_index, label, i, point, elapsed, True))
    return records


def run_experiment(config: ExperimentConfig, corpus=None) -> MaeReport:
    """Play every (player, policy) pairing and assemble the error tables.

    The same player population is paired across arms. Fully deterministic
    for a fixed config: session seeds and noise streams are derived from
    the master seed by (policy, player) index.
    """
    master = np.random.Generator(np.random.PCG64(np.random.SeedSequence([config.seed, 0])))
    if config.domain == "sudoku":
        domain = sudoku_domain(config.goal_seconds)
        noise = 0.25 if config.noise_sigma is None else config.noise_sigma
        players: list[SimPlayer] = sample_sudoku_players(config.n_players, master, noise)
    else:
        if corpus is None:
            from .roguelike import build_corpus

            corpus = build_corpus(rng=np.random.default_rng(config.corpus_seed))
        domain = roguelike_domain(corpus, config.goal_seconds)
        noise = 0.3 if config.noise_sigma is None else config.noise_sigma
        players = sample_roguelike_players(config.n_players, master, noise)

    labels = _arm_labels(config.policies)
    records: list[PlayRecord] = []
    for policy_index, (policy, label) in enumerate(zip(config.policies, labels)):
        for player_index, player in enumerate(players):
            records.extend(
                _play_session(
                    domain, policy, label, player, player_index,
                    config.iterations, config.seed, policy_index,
                )
            )

    kept = filter_outliers(records, config.domain)
    if config.cutoff_seconds is not None:
        kept = [r for r in kept if r.elapsed <= config.cutoff_seconds]
    buckets = iteration_buckets(config.domain, config.iterations) + [
        ("All", 1, config.iterations + 1)
    ]
    goal = domain.goal_seconds

    def errors(policy: str, bucket: Bucket) -> np.ndarray:
        _, lo, hi = bucket
        return np.array([
            abs(r.elapsed - goal) for r in kept
            if r.policy == policy and lo <= r.iteration < hi
        ])

    rows, welch = [], []
    flagship = "bayes" if "bayes" in labels else labels[0]
    for bucket in buckets:
        base_errs = errors(flagship, bucket)
        for policy in labels:
            errs = errors(policy, bucket)
            if errs.size == 0:
                continue
            rows.append(MaeRow(
                bucket[0], policy,
                float(errs.mean()), float(errs.std(ddof=1)) if errs.size > 1 else 0.0,
                int(errs.size),
            ))
            if policy != flagship and errs.size >= 2 and base_errs.size >= 2:
                t, dof, p = welch_t_test(list(errs), list(base_errs))
                welch.append(WelchRow(bucket[0], policy, t, dof, p, p < 0.05))
    return MaeReport(config.domain, goal, tuple(rows), tuple(welch), tuple(records))


# ---------------------------------------------------------------------------
# Pooled model and file emission
# ---------------------------------------------------------------------------


def fit_population_model(
    records: list[PlayRecord],
    prior: PriorMean,
    kernel: Kernel,
    space: DesignSpace,
    rng: np.random.Generator | None = None,
    maxfev: int | None = None,
) -> GpModel:
    """One GP over every solved play, pooled across players and policies."""
    data = [(r.design_point, r.elapsed) for r in records if r.solved]
    if not data:
        raise ValueError("no solved records to fit")
    tuned, noise = optimize_hyperparameters(
        prior, kernel, data, space=space, rng=rng, maxfev=maxfev
    )
    return fit(prior, tuned, noise, data, bounds=space)


def report_to_csv(report: MaeReport) -> str:
    """Deterministic CSV: one row per (bucket, policy), test columns on
    baseline arms."""
    welch_by_key = {(w.bucket, w.policy): w for w in report.welch}
    lines = ["bucket,policy,mae_seconds,std_seconds,n,welch_t,welch_dof,welch_p,rejected_0.05"]
    for row in report.rows:
        w = welch_by_key.get((row.bucket, row.policy))
        stats = (
            f"{w.t:.6f},{w.dof:.6f},{w.p:.6f},{str(w.rejected).lower()}" if w else ",,,"
        )
        lines.append(
            f"{row.bucket},{row.policy},{row.mae_seconds:.6f},{row.std_seconds:.6f},"
            f"{row.n},{stats}"
        )
    return "\n".join(lines) + "\n"


def records_to_jsonl(records: tuple[PlayRecord, ...]) -> str:
    lines = [
        json.dumps(
            {
                "player": r.player,
                "policy": r.policy,
                "iteration": r.iteration,
                "design_point": list(r.design_point),
                "elapsed": round(r.elapsed, 6),
                "solved": r.solved,
            },
            sort_keys=True,
        )
        for r in records
    ]
    return "\n".join(lines) + "\n"


def population_curve_csv(model: GpModel, space: DesignSpace) -> str:
    from .gp import posterior_curve

    coords = sorted(set(space.candidates))
    arr = np.asarray(coords, dtype=float)
    means, stds = posterior_curve(model, arr)
    header = ",".join(f"x{i}" for i in range(space.dim))
    lines = [f"{header},mean_seconds,std_log"]
    for point, m, s in zip(coords, means, stds):
        cols = ",".join(f"{v:g}" for v in point)
        lines.append(f"{cols},{math.exp(m):.6f},{s:.6f}")
    return "\n".join(lines) + "\n"
