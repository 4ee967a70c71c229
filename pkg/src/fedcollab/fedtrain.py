"""Desk-scale federated training over the synthetic regression tasks.

The shared model is a linear head over the polynomial feature map
(x, x^2, ..., x^degree), trained by mini-batch SGD on the mean squared
error. Epochs walk the participant's own training split, so the number
of gradient steps per round scales with local sample count — the
mechanism through which quantity skew hurts small participants.

Four pipelines are provided:

* ``local`` — every participant trains alone.
* ``fedavg`` — classic parameter averaging inside each group of a
  partition (sample-count weighted), one shared model per group.
* ``ce`` — the same procedure over coalition groups (strongly connected
  components of the benefit graph inside each clique).
* ``fedcompetitors`` — personalized: each round, participant i restarts
  local training from a normalized weighted average of its own model
  and its authorized collaborators' models, the collaborator weights
  being their benefit values and the self weight the largest of them
  (nobody trusts a collaborator more than itself).

Every participant draws shuffling randomness from its own seeded
stream, so a participant's trained model depends only on its own data
and the models that reach it through the usage graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Instance, UsageGraph
from .partition import Partition, min_clique_cover, scc_coalitions
from .selection import SelectionTrace, select_collaborators
from .synthdata import (SyntheticConfig, SyntheticTask, competing_matrix,
                        generate_task, polynomial_features, with_seed)

METHODS = ("local", "fedavg", "ce", "fedcompetitors")

AGGREGATION_RULE = "self-weight = max collaborator benefit, normalized to sum 1"

# One participant's model: the coefficient vector of the shared regression
# head. Kept opaque behind this alias so a richer parameterization can be
# swapped in without touching the pipelines.
ModelParams = np.ndarray


class TrainingDivergenceError(RuntimeError):
    """Raised when training produces non-finite parameters or losses."""


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 20
    local_epochs: int = 1
    learning_rate: float = 0.02
    batch_size: int = 32
    # relative improvement below which a cross-training gain is treated
    # as sampling noise rather than genuine benefit
    benefit_threshold: float = 0.1

    def __post_init__(self) -> None:
        if self.rounds < 1 or self.local_epochs < 1 or self.batch_size < 1:
            raise ValueError("rounds, local_epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.benefit_threshold < 0:
            raise ValueError("benefit_threshold must be nonnegative")


def mean_squared_error(theta: ModelParams, phi: np.ndarray, y: np.ndarray) -> float:
    r = phi @ theta - y
    return float(r @ r / len(y))


def loss_gradient(theta: ModelParams, phi: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of mean_squared_error with respect to theta."""
    return (2.0 / len(y)) * (phi.T @ (phi @ theta - y))


def _sgd_epochs(theta: ModelParams, phi: np.ndarray, y: np.ndarray,
                epochs: int, lr: float, batch: int, rng: np.random.Generator) -> ModelParams:
    out = theta.copy()
    m = len(y)
    for _ in range(epochs):
        order = rng.permutation(m)
        for s in range(0, m, batch):
            idx = order[s:s + batch]
            out -= lr * loss_gradient(out, phi[idx], y[idx])
    return out


def _participant_streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(np.random.SeedSequence([seed, i])) for i in range(n)]


def _prepared(task: SyntheticTask):
    degree = task.config.degree
    train, val = [], []
    for i in range(task.n):
        x, y = task.train_data(i)
        xv, yv = task.val_data(i)
        train.append((polynomial_features(x, degree), y))
        val.append((polynomial_features(xv, degree), yv))
    return train, val


def _check_finite(thetas: np.ndarray, context: str) -> None:
    if not np.isfinite(thetas).all():
        raise TrainingDivergenceError(f"non-finite model parameters during {context}")


def _local_models(task: SyntheticTask, train_data, epochs: int, cfg: TrainConfig,
                  streams) -> np.ndarray:
    thetas = np.zeros((task.n, task.config.degree))
    for i in range(task.n):
        phi, y = train_data[i]
        thetas[i] = _sgd_epochs(thetas[i], phi, y, epochs,
                                cfg.learning_rate, cfg.batch_size, streams[i])
    _check_finite(thetas, "local training")
    return thetas


def _fedavg_models(task: SyntheticTask, train_data, groups, cfg: TrainConfig,
                   streams) -> np.ndarray:
    thetas = np.zeros((task.n, task.config.degree))
    for group in groups:
        shared = np.zeros(task.config.degree)
        sizes = np.array([len(train_data[i][1]) for i in group], dtype=np.float64)
        weights = sizes / sizes.sum()
        for rnd in range(cfg.rounds):
            updates = [_sgd_epochs(shared, *train_data[i], cfg.local_epochs,
                                   cfg.learning_rate, cfg.batch_size, streams[i])
                       for i in group]
            shared = sum(w * u for w, u in zip(weights, updates))
            _check_finite(shared, f"round {rnd} of group {group}")
        for i in group:
            thetas[i] = shared
    return thetas


def aggregation_coefficients(usage: UsageGraph, benefit: np.ndarray,
                             i: int) -> tuple[list[int], np.ndarray]:
    """Personalized mixing weights for participant i: (collaborators, coefs).

    coefs[0] belongs to i itself and equals the largest collaborator
    benefit before normalization; coefs[1:] follow the collaborator
    list. Empty collaborator list means no mixing at all.
    """
    collaborators = [j for j in range(usage.n) if j != i and usage.x[j, i]]
    if not collaborators:
        return [], np.array([1.0])
    ws = np.array([benefit[j, i] for j in collaborators], dtype=np.float64)
    raw = np.concatenate(([ws.max()], ws))
    return collaborators, raw / raw.sum()


def _fedcompetitors_models(task: SyntheticTask, train_data, usage: UsageGraph,
                           benefit: np.ndarray, cfg: TrainConfig, streams) -> np.ndarray:
    n = task.n
    thetas = np.zeros((n, task.config.degree))
    mixing = [aggregation_coefficients(usage, benefit, i) for i in range(n)]
    for collaborators, coefs in mixing:
        if abs(float(coefs.sum()) - 1.0) > 1e-9:
            raise TrainingDivergenceError("aggregation weights do not sum to one")
    for rnd in range(cfg.rounds):
        snapshot = thetas.copy()
        for i in range(n):
            collaborators, coefs = mixing[i]
            if collaborators:
                assert abs(float(coefs.sum()) - 1.0) <= 1e-9
                base = coefs[0] * snapshot[i]
                for c, j in zip(coefs[1:], collaborators):
                    base = base + c * snapshot[j]
            else:
                base = snapshot[i]
            thetas[i] = _sgd_epochs(base, *train_data[i], cfg.local_epochs,
                                    cfg.learning_rate, cfg.batch_size, streams[i])
        _check_finite(thetas, f"round {rnd}")
    return thetas


def train(task: SyntheticTask, method: str, *, grouping=None,
          benefit: np.ndarray | None = None, train_config: TrainConfig = TrainConfig(),
          seed: int | None = None) -> np.ndarray:
    """Run one training pipeline; returns per-participant validation MSE.

    ``grouping`` must be a Partition for fedavg/ce (optional for local)
    and a UsageGraph plus ``benefit`` for fedcompetitors.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    seed = task.config.seed if seed is None else seed
    streams = _participant_streams(seed, task.n)
    train_data, val_data = _prepared(task)
    cfg = train_config

    if method == "local":
        if isinstance(grouping, UsageGraph):
            raise ValueError("local training takes a Partition or no grouping")
        thetas = _local_models(task, train_data, cfg.rounds * cfg.local_epochs, cfg, streams)
    elif method in ("fedavg", "ce"):
        if not isinstance(grouping, Partition):
            raise ValueError(f"{method} requires a Partition grouping")
        thetas = _fedavg_models(task, train_data, grouping.groups, cfg, streams)
    else:
        if not isinstance(grouping, UsageGraph):
            raise ValueError("fedcompetitors requires a UsageGraph grouping")
        if benefit is None:
            raise ValueError("fedcompetitors requires the benefit matrix")
        thetas = _fedcompetitors_models(task, train_data, grouping, benefit, cfg, streams)

    scores = np.array([mean_squared_error(thetas[i], *val_data[i]) for i in range(task.n)])
    if not np.isfinite(scores).all():
        raise TrainingDivergenceError("non-finite validation loss")
    return scores


def estimate_benefit(task: SyntheticTask, train_config: TrainConfig = TrainConfig(),
                     seed: int | None = None) -> np.ndarray:
    """Cross-training benefit estimate.

    ``w[j, i]`` is the validation-MSE improvement participant i would
    see by adopting a model trained purely on j's data instead of its
    own, clamped to zero when the relative improvement is below the
    configured threshold (sampling noise, not signal). Local models are
    trained exactly as the ``local`` pipeline would with the same seed.
    """
    seed = task.config.seed if seed is None else seed
    cfg = train_config
    streams = _participant_streams(seed, task.n)
    train_data, val_data = _prepared(task)
    thetas = _local_models(task, train_data, cfg.rounds * cfg.local_epochs, cfg, streams)

    n = task.n
    cross = np.empty((n, n))
    for j in range(n):
        for i in range(n):
            cross[j, i] = mean_squared_error(thetas[j], *val_data[i])
    if not np.isfinite(cross).all():
        raise TrainingDivergenceError("non-finite validation loss during benefit estimation")

    w = np.zeros((n, n))
    for i in range(n):
        base = cross[i, i]
        for j in range(n):
            if j == i:
                continue
            gain = base - cross[j, i]
            if gain > cfg.benefit_threshold * base:
                w[j, i] = gain
    return w


@dataclass
class ExperimentReport:
    """Per-method, per-participant validation MSE across repetitions."""

    methods: tuple[str, ...]
    n: int
    reps: int
    seed: int
    mean: dict[str, tuple[float, ...]]
    std: dict[str, tuple[float, ...]]
    config: SyntheticConfig
    train_config: TrainConfig
    preset: str | None
    clique_cover: Partition
    coalitions: Partition
    usage_edges: tuple[tuple[int, int], ...]
    benefit: np.ndarray
    aggregation: str = AGGREGATION_RULE

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExperimentReport):
            return NotImplemented
        return (self.methods == other.methods and self.n == other.n
                and self.reps == other.reps and self.seed == other.seed
                and self.mean == other.mean and self.std == other.std
                and self.config == other.config and self.train_config == other.train_config
                and self.preset == other.preset and self.clique_cover == other.clique_cover
                and self.coalitions == other.coalitions
                and self.usage_edges == other.usage_edges
                and np.array_equal(self.benefit, other.benefit)
                and self.aggregation == other.aggregation)


def _rep_seed(base: int, rep: int) -> int:
    return int(np.random.SeedSequence([base, rep]).generate_state(1)[0])


def run_experiment(config: SyntheticConfig, competing_edges, *,
                   methods: tuple[str, ...] = METHODS,
                   train_config: TrainConfig = TrainConfig(),
                   reps: int = 10,
                   benefit: np.ndarray | None = None,
                   preset: str | None = None) -> tuple[ExperimentReport, SelectionTrace]:
    """Full pipeline: estimate benefit, select collaborators, build the
    baseline partitions, then train every requested method over `reps`
    freshly drawn repetitions of the task.

    The benefit matrix, usage graph and partitions are computed once
    from the base-seed task (or taken from a user-supplied matrix) and
    held fixed across repetitions; repetitions redraw data and shuffle
    streams.
    """
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected a subset of {METHODS}")
    if reps < 1:
        raise ValueError("reps must be positive")

    if benefit is None:
        benefit = estimate_benefit(generate_task(config), train_config)
    instance = Instance(config.n, competing_matrix(config.n, competing_edges), benefit)
    usage, trace = select_collaborators(instance)
    cover = min_clique_cover(instance)
    coalitions = scc_coalitions(instance, cover)
    grouping = {"local": None, "fedavg": cover, "ce": coalitions, "fedcompetitors": usage}

    scores: dict[str, list[np.ndarray]] = {m: [] for m in methods}
    for rep in range(reps):
        rep_seed = _rep_seed(config.seed, rep)
        task = generate_task(with_seed(config, rep_seed))
        for m in methods:
            scores[m].append(train(task, m, grouping=grouping[m],
                                   benefit=instance.benefit if m == "fedcompetitors" else None,
                                   train_config=train_config, seed=rep_seed))

    mean = {m: tuple(float(v) for v in np.mean(scores[m], axis=0)) for m in methods}
    std = {m: tuple(float(v) for v in np.std(scores[m], axis=0)) for m in methods}
    report = ExperimentReport(
        methods=tuple(methods), n=config.n, reps=reps, seed=config.seed,
        mean=mean, std=std, config=config, train_config=train_config, preset=preset,
        clique_cover=cover, coalitions=coalitions,
        usage_edges=tuple(sorted(usage.edges())), benefit=instance.benefit,
    )
    return report, trace
