"""Cross-entropy search over condition graphs.

A small softmax policy fills in one edge type per decision slot. Decision
slots are ``(slot_pair, row)`` combinations, interleaved across rows. At
step ``t`` the policy sees a one-hot turn marker (``T`` bits) followed by
the one-hot encoded decisions made so far (``K`` bits per slot, zeros for
slots not yet decided).

Each generation samples a batch of graphs and scores them; scores are
memoised by graph key. The best fraction, together with a few all-time
best survivors, becomes the training set for a cross-entropy update.
Ranking ties are broken by graph key and then by action sequence, so runs
are reproducible for a fixed seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .coeffs import coefficient_vector
from .condgraph import CompiledTable, ConditionGraph, EdgeType, ScoreConfig, score
from .cores import CoreTypeTable, build_core_table, layout
from .errors import EmptyWhitelist, InvalidConfig, MissingDataset
from .symfunc import Partition, as_partition, format_partition, parse_partition
from .uio import generate_all_uios

K = len(EdgeType)
SCORE_MODES = ("score_1", "score_2")

SlotPair = tuple[int, int]
Decision = tuple[SlotPair, int]


def default_whitelist(arity: int) -> list[SlotPair]:
    """``(SEEnd, FirstIns)`` and ``(zero, SEStart)`` for every pair block."""
    lay = layout(arity)
    out = []
    for i, j in lay.pairs:
        out.append((lay.se_end(i, j), lay.first_ins(i, j)))
        out.append((0, lay.se_start(i, j)))
    return out


def slot_order(whitelist: Sequence[SlotPair], rows: int) -> list[Decision]:
    """``(p1, row0), ..., (p1, row r-1), (p2, row0), ...``"""
    if not whitelist:
        raise EmptyWhitelist("the slot whitelist is empty")
    if rows < 1:
        raise ValueError("rows must be positive")
    return [(tuple(p), r) for p in whitelist for r in range(rows)]


class PolicyNetwork:
    """Dense ReLU layers followed by a softmax over ``K`` actions."""

    def __init__(self, input_width: int, hidden: Sequence[int], rng: np.random.Generator, outputs: int = K):
        widths = [input_width, *hidden, outputs]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for a, b in zip(widths[:-1], widths[1:]):
            self.weights.append(rng.normal(0.0, math.sqrt(2.0 / a), size=(a, b)))
            self.biases.append(np.zeros(b))

    @property
    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def set_params(self, params: Sequence[np.ndarray]) -> None:
        self.weights = [np.array(p) for p in params[0::2]]
        self.biases = [np.array(p) for p in params[1::2]]

    def copy(self) -> "PolicyNetwork":
        other = object.__new__(PolicyNetwork)
        other.set_params(self.params)
        return other

    def _forward(self, X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        acts = [X]
        h = X
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ W + b
            if i < last:
                h = np.maximum(h, 0.0)
            acts.append(h)
        z = h - h.max(axis=1, keepdims=True)
        e = np.exp(z)
        return acts, e / e.sum(axis=1, keepdims=True)

    def forward(self, X: np.ndarray) -> np.ndarray:
        return self._forward(np.atleast_2d(X))[1]

    def loss(self, X: np.ndarray, actions: np.ndarray) -> float:
        p = self.forward(X)
        return float(-np.mean(np.log(p[np.arange(len(actions)), actions] + 1e-12)))

    def loss_and_grad(self, X: np.ndarray, actions: np.ndarray) -> tuple[float, list[np.ndarray]]:
        """Mean categorical cross-entropy and its gradient, ordered like :attr:`params`."""
        X = np.atleast_2d(X)
        acts, p = self._forward(X)
        m = len(actions)
        loss = float(-np.mean(np.log(p[np.arange(m), actions] + 1e-12)))
        delta = p.copy()
        delta[np.arange(m), actions] -= 1.0
        delta /= m
        grads: list[np.ndarray] = []
        for i in range(len(self.weights) - 1, -1, -1):
            gW = acts[i].T @ delta
            gb = delta.sum(axis=0)
            grads = [gW, gb] + grads
            if i:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        return loss, grads


def train_step(
    policy: PolicyNetwork, states: np.ndarray, actions: np.ndarray, learning_rate: float, max_halvings: int = 8
) -> tuple[float, float]:
    """One full-batch gradient step on the cross-entropy of ``states -> actions``.

    If the step does not lower the loss, the learning rate is halved and the
    step retried; after ``max_halvings`` failures the weights stay as they
    were. Returns ``(loss_after, learning_rate_used)``.
    """
    if len(actions) == 0:
        raise ValueError("train_step needs at least one training pair")
    before, grads = policy.loss_and_grad(states, actions)
    if learning_rate == 0:
        return before, 0.0
    base = policy.params
    lr = learning_rate
    for _ in range(max_halvings + 1):
        policy.set_params([p - lr * g for p, g in zip(base, grads)])
        after = policy.loss(states, actions)
        if after < before:
            return after, lr
        lr /= 2
    policy.set_params(base)
    return before, 0.0


def _encode_states(actions: np.ndarray) -> np.ndarray:
    """All ``T`` input vectors of every trajectory: shape ``(B, T, T + K*T)``."""
    B, T = actions.shape
    X = np.zeros((B, T, T + K * T), dtype=np.float64)
    for t in range(T):
        X[:, t, t] = 1.0
        for s in range(t):
            X[np.arange(B), t, T + K * s + actions[:, s]] = 1.0
    return X


def rollout_batch(
    policy: PolicyNetwork, T: int, batch: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample ``batch`` action sequences of length ``T`` step by step."""
    actions = np.zeros((batch, T), dtype=np.int64)
    for t in range(T):
        X = np.zeros((batch, T + K * T))
        X[:, t] = 1.0
        for s in range(t):
            X[np.arange(batch), T + K * s + actions[:, s]] = 1.0
        p = policy.forward(X)
        u = rng.random(batch)
        cdf = np.cumsum(p, axis=1)
        actions[:, t] = np.minimum((u[:, None] > cdf).sum(axis=1), K - 1)
    return actions


def graph_from_actions(
    arity: int, order: Sequence[Decision], actions: Sequence[int], rows: int, lam: Partition | None = None
) -> ConditionGraph:
    built: list[dict[SlotPair, EdgeType]] = [{} for _ in range(rows)]
    for (pair, r), a in zip(order, actions):
        built[r][pair] = EdgeType(int(a))
    return ConditionGraph.from_rows(arity, built, lam)


def rollout(
    policy: PolicyNetwork, config: "TrainerConfig", rng: np.random.Generator
) -> tuple[ConditionGraph, list[tuple[np.ndarray, int]]]:
    """Sample a single graph; returns it with its ``(state, action)`` trajectory."""
    order = slot_order(config.resolved_whitelist(), config.rows)
    acts = rollout_batch(policy, len(order), 1, rng)
    states = _encode_states(acts)[0]
    G = graph_from_actions(len(config.lam), order, acts[0], config.rows, config.lam)
    return G, [(states[t], int(acts[0, t])) for t in range(len(order))]


@dataclass
class TrainerConfig:
    lam: Partition
    n: int
    rows: int = 1
    whitelist: list[SlotPair] | None = None
    batch_size: int = 600
    elite_fraction: float = 0.10
    survivor_fraction: float = 0.03
    learning_rate: float = 0.01
    steps_per_generation: int = 10
    hidden: tuple[int, ...] = (128, 64)
    edge_penalty: Fraction = Fraction(1, 10)
    score_mode: str = "score_1"
    trivial_row: str = "empty"
    uio_subsample: int | None = None
    seed: int = 0
    generations: int = 100
    stop_on_exact: bool = False

    def __post_init__(self) -> None:
        self.lam = as_partition(self.lam)
        self.edge_penalty = Fraction(str(self.edge_penalty))
        self.hidden = tuple(int(h) for h in self.hidden)
        if self.whitelist is not None:
            self.whitelist = [tuple(int(x) for x in p) for p in self.whitelist]
        if not 0 < self.elite_fraction < 1 or not 0 < self.survivor_fraction < 1:
            raise InvalidConfig("elite and survivor fractions must lie in (0, 1)")
        if self.batch_size < 10:
            raise InvalidConfig("batch_size must be at least 10")
        if self.score_mode not in SCORE_MODES:
            raise InvalidConfig(f"score_mode must be one of {SCORE_MODES}")
        if self.rows < 1 or self.generations < 0 or self.learning_rate < 0:
            raise InvalidConfig("rows must be positive; generations and learning_rate nonnegative")
        if not 2 <= len(self.lam) <= 4:
            raise InvalidConfig("training needs a partition with 2..4 parts")

    def resolved_whitelist(self) -> list[SlotPair]:
        return list(self.whitelist) if self.whitelist is not None else default_whitelist(len(self.lam))

    def score_config(self) -> ScoreConfig:
        return ScoreConfig(
            edge_penalty=self.edge_penalty,
            lower_bound_mode=self.score_mode == "score_2",
            trivial_row=self.trivial_row,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lam"] = format_partition(self.lam)
        d["edge_penalty"] = str(self.edge_penalty)
        d["hidden"] = list(self.hidden)
        d["whitelist"] = None if self.whitelist is None else [list(p) for p in self.whitelist]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainerConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        if "lam" not in d or "n" not in d:
            raise InvalidConfig("config needs 'lam' and 'n'")
        d = dict(d)
        if isinstance(d["lam"], str):
            d["lam"] = parse_partition(d["lam"])
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from exc


def write_config(path: str | Path, config: TrainerConfig) -> None:
    """JSON object whose keys are the :class:`TrainerConfig` field names."""
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_config(path: str | Path) -> TrainerConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"{path} must hold a JSON object")
    return TrainerConfig.from_dict(data)


@dataclass
class HistoryRow:
    generation: int
    best_score: Fraction
    mean_score: Fraction
    num_edges_best: int
    best_l1: int


@dataclass
class TrainResult:
    best_graph: ConditionGraph
    best_score: Fraction
    history: list[HistoryRow]
    evaluations: int = 0
    cache_hits: int = 0


def history_csv(history: Sequence[HistoryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generation", "best_score", "mean_score", "num_edges_best"])
    for h in history:
        w.writerow([h.generation, f"{float(h.best_score):.6f}", f"{float(h.mean_score):.6f}", h.num_edges_best])
    return buf.getvalue()


def write_history(path: str | Path, history: Sequence[HistoryRow]) -> None:
    Path(path).write_text(history_csv(history), encoding="utf-8")


class ScoreCache:
    """Memoised ``graph key -> (score, L1 error)``."""

    def __init__(self, table: CompiledTable, truth: np.ndarray, cfg: ScoreConfig):
        self.table = table
        self.truth = truth
        self.cfg = cfg
        self.store: dict[tuple, tuple[Fraction, int]] = {}
        self.hits = 0
        self.misses = 0

    def __call__(self, G: ConditionGraph) -> tuple[Fraction, int]:
        key = G.key()
        hit = self.store.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        pred = self.table.predict(G)
        val = (score(G, pred, self.truth, self.cfg, self.table), int(np.abs(pred - self.truth).sum()))
        self.store[key] = val
        return val


def prepare_data(
    config: TrainerConfig, table: CoreTypeTable | None = None, truth: Sequence[int] | None = None
) -> tuple[CompiledTable, np.ndarray]:
    """Compile the core table and truth vector, applying the seeded UIO subsample."""
    if table is None or truth is None:
        if sum(config.lam) > config.n:
            raise MissingDataset(f"no tuples of shape {config.lam} at n={config.n}")
        uios = generate_all_uios(config.n)
        table = table if table is not None else build_core_table(config.lam, config.n, uios)
        truth = truth if truth is not None else coefficient_vector(config.lam, uios)
    if len(truth) != table.num_uios:
        raise MissingDataset("truth vector and core table cover different UIO sets")
    subset = None
    if config.uio_subsample is not None and config.uio_subsample < table.num_uios:
        sub_rng = np.random.default_rng([config.seed, 1])
        subset = sorted(sub_rng.choice(table.num_uios, size=config.uio_subsample, replace=False).tolist())
    compiled = CompiledTable.from_table(table, subset)
    truth_arr = np.asarray(truth, dtype=np.int64)
    if subset is not None:
        truth_arr = truth_arr[subset]
    return compiled, truth_arr


def train(
    config: TrainerConfig,
    table: CoreTypeTable | None = None,
    truth: Sequence[int] | None = None,
) -> TrainResult:
    compiled, truth_arr = prepare_data(config, table, truth)
    arity = len(config.lam)
    order = slot_order(config.resolved_whitelist(), config.rows)
    width = len(layout(arity))
    for (s, d), _ in order:
        if not (0 <= s < width and 0 <= d < width):
            raise InvalidConfig(f"whitelist pair ({s}, {d}) outside the {width}-slot layout")
    T = len(order)
    rng = np.random.default_rng(config.seed)
    policy = PolicyNetwork(T + K * T, config.hidden, rng)
    evaluate = ScoreCache(compiled, truth_arr, config.score_config())

    n_elite = max(1, math.ceil(config.elite_fraction * config.batch_size))
    n_keep = max(1, math.ceil(config.survivor_fraction * config.batch_size))
    survivors: list[tuple] = []
    best: tuple | None = None
    history: list[HistoryRow] = []

    for gen in range(config.generations):
        acts = rollout_batch(policy, T, config.batch_size, rng)
        batch = []
        for a in acts:
            G = graph_from_actions(arity, order, a, config.rows, config.lam)
            s, l1 = evaluate(G)
            batch.append((-s, G.key(), tuple(int(x) for x in a), G, s, l1))
        mean = sum((b[4] for b in batch), Fraction(0)) / len(batch)
        pool = sorted(batch + survivors, key=lambda b: b[:3])
        elites = pool[:n_elite]
        survivors = []
        seen = set()
        for b in pool:
            if b[2] not in seen:
                seen.add(b[2])
                survivors.append(b)
            if len(survivors) == n_keep:
                break
        if best is None or pool[0][:3] < best[:3]:
            best = pool[0]
        history.append(HistoryRow(gen, best[4], mean, best[3].num_edges, best[5]))

        states = _encode_states(np.array([e[2] for e in elites], dtype=np.int64)).reshape(-1, T + K * T)
        targets = np.array([e[2] for e in elites], dtype=np.int64).reshape(-1)
        for _ in range(config.steps_per_generation):
            train_step(policy, states, targets, config.learning_rate)
        if config.stop_on_exact and best[5] == 0:
            break

    if best is None:
        G = graph_from_actions(arity, order, [EdgeType.IRRELEVANT] * T, config.rows, config.lam)
        s, _ = evaluate(G)
        return TrainResult(G, s, history, evaluate.misses, evaluate.hits)
    return TrainResult(best[3], best[4], history, evaluate.misses, evaluate.hits)
