"""HTTP session service: serves content, records results, survives restarts.

Sessions live in memory behind per-session locks; every state change is
appended to a JSONL playtrace log first, so a restarted server replays the
log and reaches the identical next decision (all per-decision randomness is
derived from persisted seeds and history length, never from live state).
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import sudoku
from .engine import (
    SALT_CONTENT,
    Observation,
    OutOfOrderResult,
    PolicyConfig,
    SessionState,
    current_model,
    new_session,
    next_content,
    record_result,
    roguelike_domain,
    sudoku_domain,
)
from .gp import posterior_curve
from .roguelike import Corpus, level_to_text

CLOCK_SKEW_ALLOWANCE_S = 5.0
SESSION_TIMEOUT_S = 3600.0


@dataclass(frozen=True)
class ServiceConfig:
    policies: tuple[str, ...] = ("bayes", "binary", "linreg", "random")
    seed: int = 0
    log_path: str | Path | None = None
    corpus: Corpus | None = None
    clock: Callable[[], float] = time.time
    session_timeout_s: float = SESSION_TIMEOUT_S


@dataclass
class SessionRuntime:
    state: SessionState
    lock: threading.RLock = field(default_factory=threading.RLock)
    content: dict | None = None  # last served payload, plus server-only fields
    served_at: float = 0.0
    last_activity: float = 0.0


class CreateSessionRequest(BaseModel):
    domain: str
    policy: str | None = None
    goal_seconds: float | None = None
    seed: int | None = None


class SubmitResultRequest(BaseModel):
    content_id: str
    elapsed_ms: float
    solved: bool = False
    solution: str | None = None


class SessionService:
    """All session state and the append-only playtrace log."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.sessions: dict[str, SessionRuntime] = {}
        self.store_lock = threading.Lock()
        self.log_lock = threading.Lock()
        self.session_counter = 0
        if config.log_path is not None and Path(config.log_path).exists():
            self._replay_log(Path(config.log_path))

    # -- persistence --------------------------------------------------------

    def _append_log(self, record: dict) -> None:
        if self.config.log_path is None:
            return
        with self.log_lock:
            with open(self.config.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()

    def _replay_log(self, path: Path) -> None:
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            if record["type"] == "session":
                runtime = self._build_session(
                    session_id=record["session_id"],
                    domain_name=record["domain"],
                    policy=record["policy"],
                    goal_seconds=record["goal_seconds"],
                    seed=record["seed"],
                )
                self.sessions[record["session_id"]] = runtime
                self.session_counter += 1
            elif record["type"] == "result":
                runtime = self.sessions[record["session_id"]]
                point = tuple(float(v) for v in record["design_point"])
                expected = next_content(runtime.state)
                if tuple(expected) != point:
                    raise RuntimeError(
                        f"log replay diverged for {record['session_id']}: "
                        f"recorded {point}, recomputed {expected}"
                    )
                self._apply_result(
                    runtime,
                    Observation(
                        design_point=point,
                        content_id=record["content_id"],
                        elapsed=record["elapsed_ms"] / 1000.0,
                        solved=record["solved"],
                        recorded_at=record["ts_ms"] / 1000.0,
                    ),
                )

    # -- session construction ------------------------------------------------

    def _build_session(
        self,
        session_id: str,
        domain_name: str,
        policy: str,
        goal_seconds: float | None,
        seed: int,
    ) -> SessionRuntime:
        if domain_name == "sudoku":
            domain = sudoku_domain(goal_seconds)
        elif domain_name == "roguelike":
            if self.config.corpus is None:
                raise HTTPException(400, "server has no level corpus loaded")
            domain = roguelike_domain(self.config.corpus, goal_seconds)
        else:
            raise HTTPException(400, f"unknown domain {domain_name!r}")
        try:
            state = new_session(session_id, domain, PolicyConfig(kind=policy), seed=seed)
        except ValueError as err:
            raise HTTPException(400, str(err)) from None
        now = self.config.clock()
        return SessionRuntime(state=state, served_at=now, last_activity=now)

    def create_session(self, req: CreateSessionRequest) -> dict:
        with self.store_lock:
            counter = self.session_counter
            self.session_counter += 1
        session_id = f"s{counter:06d}"
        setup_rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.config.seed, counter]))
        )
        policy = req.policy
        if policy is None:
            policy = self.config.policies[int(setup_rng.integers(len(self.config.policies)))]
        seed = req.seed if req.seed is not None else int(setup_rng.integers(2**31))
        runtime = self._build_session(session_id, req.domain, policy, req.goal_seconds, seed)
        with self.store_lock:
            self.sessions[session_id] = runtime
        self._append_log(
            {
                "type": "session",
                "ts_ms": int(self.config.clock() * 1000),
                "session_id": session_id,
                "domain": req.domain,
                "policy": policy,
                "goal_seconds": runtime.state.goal_seconds,
                "seed": seed,
            }
        )
        with runtime.lock:
            content = self._serve_content(runtime)
        return {
            "session_id": session_id,
            "domain": req.domain,
            "policy": policy,
            "goal_seconds": runtime.state.goal_seconds,
            "content": content,
        }

    # -- content serving ----------------------------------------------------

    def _serve_content(self, runtime: SessionRuntime) -> dict:
        state = runtime.state
        point = next_content(state)
        content_id = f"{state.session_id}:{len(state.history)}"
        if runtime.content is not None and runtime.content["content_id"] == content_id:
            return self._public_content(runtime.content)
        rng = state.rng(SALT_CONTENT)
        if state.domain.name == "sudoku":
            hints = int(point[0])
            puzzle = sudoku.dig_to_hints(sudoku.generate_full_grid(rng), hints, rng)
            payload = {
                "domain": "sudoku",
                "content_id": content_id,
                "design_point": list(point),
                "hint_count": hints,
                "puzzle": sudoku.grid_to_text(puzzle.givens),
                "_puzzle": puzzle,
            }
        else:
            matches = self.config.corpus.levels_at(point)  # type: ignore[union-attr]
            level = matches[int(rng.integers(len(matches)))]
            payload = {
                "domain": "roguelike",
                "content_id": content_id,
                "design_point": list(point),
                "level_id": level.level_id,
                "level_text": level_to_text(level),
                "leniency": level.leniency,
                "reachability": level.reachability,
                "game_seed": int(rng.integers(2**32)),
            }
        runtime.content = payload
        runtime.served_at = self.config.clock()
        return self._public_content(payload)

    @staticmethod
    def _public_content(payload: dict) -> dict:
        return {k: v for k, v in payload.items() if not k.startswith("_")}

    def _apply_result(self, runtime: SessionRuntime, obs: Observation) -> None:
        """Shared by live submits and log replay so decisions never diverge."""
        state = runtime.state
        record_result(state, obs)
        if state.domain.name == "sudoku" and not obs.solved:
            state.pending = obs.design_point  # retry the same difficulty
        runtime.content = None

    # -- request handlers ----------------------------------------------------

    def _runtime_or_error(self, session_id: str) -> SessionRuntime:
        runtime = self.sessions.get(session_id)
        if runtime is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        if self.config.clock() - runtime.last_activity > self.config.session_timeout_s:
            raise HTTPException(410, "session timed out")
        return runtime

    def submit_result(self, session_id: str, req: SubmitResultRequest) -> dict:
        runtime = self._runtime_or_error(session_id)
        with runtime.lock:
            runtime.last_activity = self.config.clock()
            if runtime.content is None:
                # after a log replay nothing has been served yet; the salted
                # rng makes this rebuild identical to what was served before
                self._serve_content(runtime)
            current = runtime.content
            if current is None or req.content_id != current["content_id"]:
                raise HTTPException(
                    409,
                    {
                        "error": "content_id is stale or already submitted",
                        "content": self._public_content(current) if current else None,
                    },
                )
            if req.elapsed_ms <= 0:
                raise HTTPException(400, "elapsed_ms must be positive")
            elapsed = req.elapsed_ms / 1000.0
            wall = self.config.clock() - runtime.served_at
            if elapsed > wall + CLOCK_SKEW_ALLOWANCE_S:
                elapsed = max(wall, 1e-3)
            solved = bool(req.solved)
            if runtime.state.domain.name == "sudoku":
                if req.solution is None:
                    solved = False
                else:
                    try:
                        grid = sudoku.text_to_grid(req.solution)
                    except ValueError as err:
                        raise HTTPException(400, str(err)) from None
                    solved = sudoku.validate_submission(current["_puzzle"], grid)
            point = tuple(float(v) for v in current["design_point"])
            obs = Observation(
                design_point=point,
                content_id=req.content_id,
                elapsed=elapsed,
                solved=solved,
                recorded_at=self.config.clock(),
            )
            self._append_log(
                {
                    "type": "result",
                    "ts_ms": int(obs.recorded_at * 1000),
                    "session_id": session_id,
                    "domain": runtime.state.domain.name,
                    "policy": runtime.state.policy.kind,
                    "iteration": len(runtime.state.history) + 1,
                    "design_point": list(point),
                    "content_id": req.content_id,
                    "elapsed_ms": round(elapsed * 1000.0, 3),
                    "solved": solved,
                }
            )
            try:
                self._apply_result(runtime, obs)
            except OutOfOrderResult as err:  # pragma: no cover - guarded by 409 above
                raise HTTPException(409, str(err)) from None
            content = self._serve_content(runtime)
        return {
            "recorded": {
                "design_point": list(point),
                "elapsed_seconds": elapsed,
                "solved": solved,
                "iteration": len(runtime.state.history),
            },
            "content": content,
        }

    def get_model(self, session_id: str) -> dict:
        runtime = self._runtime_or_error(session_id)
        with runtime.lock:
            runtime.last_activity = self.config.clock()
            state = runtime.state
            base = {
                "policy": state.policy.kind,
                "goal_seconds": state.goal_seconds,
                "observations": [
                    {
                        "design_point": list(o.design_point),
                        "elapsed_seconds": o.elapsed,
                        "solved": o.solved,
                    }
                    for o in state.history
                ],
            }
            if state.policy.kind != "bayes":
                return {**base, "points": []}
            model = current_model(state)
            coords = sorted(set(state.domain.space.candidates))
            means, stds = posterior_curve(model, np.asarray(coords, dtype=float))
            return {
                **base,
                "points": [
                    {
                        "design_point": list(c),
                        "predicted_seconds": math.exp(float(m)),
                        "std_log": float(s),
                    }
                    for c, m, s in zip(coords, means, stds)
                ],
            }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    service = SessionService(config if config is not None else ServiceConfig())
    app = FastAPI(title="goaltime", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.service = service

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "sessions": len(service.sessions)}

    @app.post("/api/session")
    def create_session(req: CreateSessionRequest) -> dict:
        return service.create_session(req)

    @app.post("/api/session/{session_id}/result")
    def submit_result(session_id: str, req: SubmitResultRequest) -> dict:
        return service.submit_result(session_id, req)

    @app.get("/api/session/{session_id}/model")
    def get_model(session_id: str) -> dict:
        return service.get_model(session_id)

    return app
