"""Pool-based binary classification primitives.

Pools of unlabeled examples, Bernoulli label models (optionally with
persistent realizations), finite hypothesis classes given as labeling
matrices, pool error / gap computation, and the exact coordinate change
to the combinatorial-bandit view (means mu = 2*eta - 1, hypotheses as
subsets of the pool).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np


class ImplicitClassError(TypeError):
    """Raised when an operation needs an explicitly enumerated class."""


@dataclass(frozen=True, eq=False)
class Pool:
    """A pool of n examples, optionally with a feature matrix (n x p)."""

    n: int
    features: np.ndarray | None = None
    ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("pool needs at least one example")
        if self.features is not None:
            feats = np.asarray(self.features, dtype=float)
            if feats.ndim != 2 or feats.shape[0] != self.n:
                raise ValueError(f"features must be {self.n} x p")
            object.__setattr__(self, "features", feats)
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(self.n)))
        elif len(self.ids) != self.n:
            raise ValueError("ids length must equal n")


class LabelModel:
    """Bernoulli(eta_i) label source over a pool.

    In persistent mode every coordinate's label is realized once (from the
    seed, at construction) and cached, so repeated queries of the same
    index always return the same value. Queries mutate the internal RNG in
    non-persistent mode; access is serialized with a lock.
    """

    def __init__(self, eta, persistent: bool = False, seed: int = 0):
        eta = np.asarray(eta, dtype=float)
        if eta.ndim != 1 or eta.size < 1:
            raise ValueError("eta must be a non-empty 1-d vector")
        if np.any(eta < 0) or np.any(eta > 1):
            raise ValueError("eta entries must lie in [0, 1]")
        self.eta = eta
        self.persistent = persistent
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self._lock = threading.Lock()
        if persistent:
            self._realized = (self._rng.random(eta.size) < eta).astype(np.int8)
        else:
            self._realized = None

    @property
    def n(self) -> int:
        return self.eta.size

    def query(self, i: int) -> int:
        """Observe a label for example i."""
        if not 0 <= i < self.n:
            raise IndexError(f"index {i} out of range for pool of size {self.n}")
        with self._lock:
            if self.persistent:
                return int(self._realized[i])
            return int(self._rng.random() < self.eta[i])

    def query_many(self, indices) -> np.ndarray:
        """Vectorized query; persistent mode returns the cached labels."""
        idx = np.asarray(indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise IndexError("query index out of range")
        with self._lock:
            if self.persistent:
                return self._realized[idx].astype(np.int8)
            return (self._rng.random(idx.size) < self.eta[idx]).astype(np.int8)

    def realized_labels(self) -> np.ndarray:
        """The cached realization (persistent mode only)."""
        if not self.persistent:
            raise ValueError("realized labels exist only in persistent mode")
        return self._realized.copy()


class HypothesisClass:
    """A set of binary labelings over the pool.

    Explicit mode stores a deduplicated |H| x n {0,1} matrix (first
    occurrence kept, so index-based tie-breaking is deterministic).
    Implicit mode wraps a weighted-ERM oracle; enumeration-based
    operations raise ImplicitClassError.
    """

    def __init__(self, labelings=None, oracle=None, dedup: bool = True):
        if (labelings is None) == (oracle is None):
            raise ValueError("provide exactly one of labelings / oracle")
        self.oracle = oracle
        self.dedup = dedup
        if labelings is not None:
            mat = np.asarray(labelings)
            if mat.ndim != 2 or mat.shape[0] < 1:
                raise ValueError("labelings must be a non-empty 2-d matrix")
            if not np.isin(mat, (0, 1)).all():
                raise ValueError("labelings entries must be 0/1")
            mat = mat.astype(np.int8)
            if dedup:
                _, first = np.unique(mat, axis=0, return_index=True)
                mat = mat[np.sort(first)]
            self.labelings = mat
        else:
            self.labelings = None

    @property
    def explicit(self) -> bool:
        return self.labelings is not None

    @property
    def size(self) -> int:
        if not self.explicit:
            raise ImplicitClassError("implicit class has no enumerable size")
        return self.labelings.shape[0]

    @property
    def n(self) -> int:
        if self.explicit:
            return self.labelings.shape[1]
        return self.oracle.n

    def labeling(self, h) -> np.ndarray:
        """Labeling vector for a hypothesis handle (index or model)."""
        if isinstance(h, (int, np.integer)):
            if not self.explicit:
                raise ImplicitClassError("integer handles need an explicit class")
            if not 0 <= h < self.size:
                raise ValueError(f"hypothesis index {h} out of range")
            return self.labelings[int(h)]
        return np.asarray(h.predict(self.oracle.features), dtype=np.int8)


@dataclass(frozen=True, eq=False)
class Instance:
    """A pool, a hypothesis class over it, and a label model."""

    pool: Pool
    hypotheses: HypothesisClass
    labels: LabelModel

    @property
    def n(self) -> int:
        return self.pool.n


@dataclass(frozen=True, eq=False)
class BanditView:
    """Combinatorial-bandit coordinates: mu = 2*eta - 1, hypotheses as sets."""

    mu: np.ndarray
    sets: tuple
    labelings: np.ndarray

    def set_sum(self, h: int) -> float:
        return float(self.mu[self.labelings[h].astype(bool)].sum())


@dataclass(frozen=True, eq=False)
class GapTable:
    h_star: int
    nu: float
    gaps: np.ndarray
    delta_min: float


def pool_error(hclass: HypothesisClass, h: int, labels: LabelModel) -> float:
    """Expected pool error of hypothesis h under the label means."""
    hv = hclass.labeling(h).astype(float)
    eta = labels.eta
    return float(np.mean(eta * (1.0 - hv) + (1.0 - eta) * hv))


def errors_all(hclass: HypothesisClass, labels: LabelModel) -> np.ndarray:
    """Pool error of every hypothesis in an explicit class."""
    if not hclass.explicit:
        raise ImplicitClassError("error enumeration needs an explicit class")
    eta = labels.eta
    L = hclass.labelings.astype(float)
    return (eta.sum() + L @ (1.0 - 2.0 * eta)) / hclass.n


def gap_table(hclass: HypothesisClass, labels: LabelModel) -> GapTable:
    """Exact gaps; ties for the best hypothesis break to the lowest index."""
    errs = errors_all(hclass, labels)
    h_star = int(np.argmin(errs))
    gaps = errs - errs[h_star]
    gaps[h_star] = 0.0
    positive = gaps[gaps > 0]
    delta_min = float(positive.min()) if positive.size else 0.0
    return GapTable(h_star=h_star, nu=float(errs[h_star]), gaps=gaps, delta_min=delta_min)


def query(labels: LabelModel, i: int) -> int:
    return labels.query(i)


def to_bandit(hclass: HypothesisClass, labels: LabelModel) -> BanditView:
    """Coordinate change: argmin pool error = argmax set-sum of mu."""
    if not hclass.explicit:
        raise ImplicitClassError("bandit view needs an explicit class")
    mu = 2.0 * labels.eta - 1.0
    sets = tuple(np.flatnonzero(row) for row in hclass.labelings)
    return BanditView(mu=mu, sets=sets, labelings=hclass.labelings)
