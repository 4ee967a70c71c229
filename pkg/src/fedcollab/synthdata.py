"""Synthetic non-IID polynomial regression tasks.

Each participant i holds scalar features x ~ U[-1, 1] and labels

    y = s_i * sum_l u[i, l] * x^l + eps,   l = 1..degree,

where the ground-truth weights u[i, l] = v[l] + r[i, l] share a base
v ~ U[0, 1] drawn once for the whole task and differ by per-participant
perturbations r[i, l] ~ N(0, rho^2); eps ~ N(0, noise_std^2) and
s_i = -1 for label-flipped participants. rho controls how non-IID the
feature-to-label maps are; flips create outright conflicting tasks.

Two fixed eight-participant presets are bundled:

* ``weak_noniid`` — rho = 0.01, quantity skew (participants 1, 2, 5, 6
  hold 2000 samples, the rest 100), no flips; the two large blocks
  compete across, and each small participant competes with one large one.
* ``strong_noniid`` — no skew (2000 samples each), labels flipped for
  participants 5..8; competition makes {1,2} vs {3,4} and {5,6} vs {7,8}
  enemies inside two otherwise independent halves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# Unordered competing pairs, 0-based.
WEAK_COMPETING_EDGES: tuple[tuple[int, int], ...] = (
    (0, 4), (0, 5), (1, 4), (1, 5),  # large vs large across the blocks
    (0, 6), (1, 7), (2, 4), (3, 5),  # each small vs one large
)
STRONG_COMPETING_EDGES: tuple[tuple[int, int], ...] = (
    (0, 2), (0, 3), (1, 2), (1, 3),
    (4, 6), (4, 7), (5, 6), (5, 7),
)

PRESET_NAMES = ("weak_noniid", "strong_noniid")


@dataclass(frozen=True)
class SyntheticConfig:
    n: int
    samples: tuple[int, ...]
    flipped: tuple[bool, ...]
    rho: float = 0.01
    degree: int = 3
    noise_std: float = 0.1
    seed: int = 0
    val_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one participant")
        if len(self.samples) != self.n or any(m < 1 for m in self.samples):
            raise ValueError("samples must list a positive count per participant")
        if len(self.flipped) != self.n:
            raise ValueError("flipped must list a flag per participant")
        if self.rho < 0 or self.noise_std < 0:
            raise ValueError("rho and noise_std must be nonnegative")
        if self.degree < 1:
            raise ValueError("degree must be positive")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")


@dataclass
class SyntheticTask:
    """Per-participant data with ground truth and a fixed train/val split."""

    config: SyntheticConfig
    features: list[np.ndarray]
    labels: list[np.ndarray]
    weights: np.ndarray  # (n, degree) ground-truth coefficients
    train_idx: list[np.ndarray]
    val_idx: list[np.ndarray]

    @property
    def n(self) -> int:
        return self.config.n

    def train_data(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.features[i][self.train_idx[i]], self.labels[i][self.train_idx[i]]

    def val_data(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.features[i][self.val_idx[i]], self.labels[i][self.val_idx[i]]


def polynomial_features(x: np.ndarray, degree: int) -> np.ndarray:
    """Feature map (x, x^2, ..., x^degree) as an (m, degree) matrix."""
    return np.power.outer(x, np.arange(1, degree + 1, dtype=np.float64))


def generate_task(config: SyntheticConfig) -> SyntheticTask:
    """Draw a task deterministically from config.seed.

    The shared base weights use one seed stream and every participant
    has its own substream, so one participant's data does not depend on
    another's sample count.
    """
    root = np.random.SeedSequence(config.seed)
    shared, *per_part = root.spawn(config.n + 1)
    base = np.random.default_rng(shared).uniform(0.0, 1.0, size=config.degree)

    features, labels, train_idx, val_idx = [], [], [], []
    weights = np.empty((config.n, config.degree))
    for i in range(config.n):
        rng = np.random.default_rng(per_part[i])
        u = base + rng.normal(0.0, config.rho, size=config.degree)
        weights[i] = u
        m = config.samples[i]
        x = rng.uniform(-1.0, 1.0, size=m)
        noise = rng.normal(0.0, config.noise_std, size=m)
        sign = -1.0 if config.flipped[i] else 1.0
        y = sign * polynomial_features(x, config.degree) @ u + noise
        perm = rng.permutation(m)
        features.append(x)
        labels.append(y)
        if m == 1:
            # degenerate holder: the single sample serves both roles
            val_idx.append(perm.copy())
            train_idx.append(perm.copy())
        else:
            n_val = min(max(1, int(round(m * config.val_fraction))), m - 1)
            val_idx.append(np.sort(perm[:n_val]))
            train_idx.append(np.sort(perm[n_val:]))
    return SyntheticTask(config=config, features=features, labels=labels,
                         weights=weights, train_idx=train_idx, val_idx=val_idx)


def weak_noniid_config(seed: int = 0) -> SyntheticConfig:
    return SyntheticConfig(
        n=8,
        samples=(2000, 2000, 100, 100, 2000, 2000, 100, 100),
        flipped=(False,) * 8,
        rho=0.01,
        seed=seed,
    )


def strong_noniid_config(seed: int = 0) -> SyntheticConfig:
    return SyntheticConfig(
        n=8,
        samples=(2000,) * 8,
        flipped=(False, False, False, False, True, True, True, True),
        rho=0.01,
        seed=seed,
    )


def preset(name: str, seed: int = 0) -> tuple[SyntheticConfig, tuple[tuple[int, int], ...]]:
    """Bundled (config, competing edges) pair for a named preset."""
    if name == "weak_noniid":
        return weak_noniid_config(seed), WEAK_COMPETING_EDGES
    if name == "strong_noniid":
        return strong_noniid_config(seed), STRONG_COMPETING_EDGES
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def competing_matrix(n: int, edges) -> np.ndarray:
    """Symmetric boolean adjacency from unordered index pairs."""
    s = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        s[a, b] = s[b, a] = True
    return s


def with_seed(config: SyntheticConfig, seed: int) -> SyntheticConfig:
    return replace(config, seed=seed)
