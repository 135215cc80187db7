"""Label-mean estimators built from query logs.

Four families: the naive per-coordinate average, inverse-propensity
scoring with an additive shift gamma, the ridge-shifted IPS pair
estimator (per-direction shrinkage with a prescribed shift), and the
multi-scale feasibility estimator that intersects pairwise ridge-IPS
confidence slabs over an admissible sequence of the hypothesis set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import HypothesisClass


class InvalidDesignError(ValueError):
    """A direction is supported where the sampling distribution has no mass."""


@dataclass(frozen=True)
class QueryRecord:
    """One logged query: round, pool index, sampling probability, observed label."""

    round: int
    index: int
    prob: float
    label: int


@dataclass(eq=False)
class EtaEstimate:
    """An estimate of the label means with its bandit-scale twin.

    values is the eta-hat vector (clipped to [0,1] only for the naive
    family); mu is the matching bandit estimate. For the naive family
    mu = 2*values - 1 exactly; the IPS families estimate mu directly
    from +/-1 labels, so the two are distinct estimators.
    """

    values: np.ndarray
    mu: np.ndarray
    counts: np.ndarray
    kind: str
    t: int
    flags: dict = field(default_factory=dict)


def _log_arrays(log):
    idx = np.array([q.index for q in log], dtype=int)
    prob = np.array([q.prob for q in log], dtype=float)
    y = np.array([q.label for q in log], dtype=float)
    return idx, prob, y


def naive_estimate(log, n: int) -> EtaEstimate:
    """Per-coordinate average of observed labels; unqueried default to 0.5."""
    counts = np.zeros(n, dtype=int)
    sums = np.zeros(n)
    if log:
        idx, _, y = _log_arrays(log)
        np.add.at(counts, idx, 1)
        np.add.at(sums, idx, y)
    values = np.full(n, 0.5)
    seen = counts > 0
    values[seen] = sums[seen] / counts[seen]
    return EtaEstimate(values=values, mu=2.0 * values - 1.0, counts=counts,
                       kind="naive", t=len(log))


def ips_estimate(log, n: int, gamma: float = 0.0) -> EtaEstimate:
    """Importance-weighted estimate (1/T) sum_t y_t / (lambda_{I_t} + gamma).

    The bandit-scale mu uses +/-1 labels with the same weights. gamma = 0
    is unbiased; the shift trades bias for bounded weights.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    counts = np.zeros(n, dtype=int)
    values = np.zeros(n)
    mu = np.zeros(n)
    if log:
        idx, prob, y = _log_arrays(log)
        denom = prob + gamma
        if np.any(denom <= 0):
            raise InvalidDesignError("logged probability + gamma must be positive")
        np.add.at(counts, idx, 1)
        np.add.at(values, idx, y / denom)
        np.add.at(mu, idx, (2.0 * y - 1.0) / denom)
        values /= len(log)
        mu /= len(log)
    return EtaEstimate(values=values, mu=mu, counts=counts, kind="ips",
                       t=len(log), flags={"gamma": gamma})


def _pm_sums(log, n):
    """Per-coordinate sums of +/-1 labels (the X^T y vector)."""
    sums = np.zeros(n)
    if log:
        idx, _, y = _log_arrays(log)
        np.add.at(sums, idx, 2.0 * y - 1.0)
    return sums


def ridge_shift(v, lam, t: int, delta: float) -> float:
    """The prescribed shift s = sqrt(log(2/delta) / (3 ||v||^2_{A(t lam)^-1}))."""
    v = np.asarray(v, dtype=float)
    lam = np.asarray(lam, dtype=float)
    support = v != 0
    if np.any(lam[support] <= 0):
        raise InvalidDesignError("direction supported outside the design")
    norm_sq = float(np.sum(v[support] ** 2 / (t * lam[support])))
    if norm_sq == 0:
        raise ValueError("zero direction has no prescribed shift")
    return math.sqrt(math.log(2.0 / delta) / (3.0 * norm_sq))


def ridge_ips_vector(log, lam, n: int, s: float) -> np.ndarray:
    """mu-hat = (A(t lam) + s I)^{-1} X^T y; diagonal, so O(n)."""
    t = len(log)
    lam = np.asarray(lam, dtype=float)
    return _pm_sums(log, n) / (t * lam + s)


def ridge_ips_pair(log, lam, v, delta: float) -> float:
    """Estimate <v, mu> with the ridge-shifted IPS estimator.

    The shift is the one balancing the bias and the Bernstein tail for
    this direction; a zero direction returns 0 exactly.
    """
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return 0.0
    n = v.size
    s = ridge_shift(v, lam, len(log), delta)
    mu_hat = ridge_ips_vector(log, lam, n, s)
    return float(v @ mu_hat)


def ridge_pair_bound(v, lam, t: int, delta: float) -> float:
    """Deviation bound (sqrt(2/3)+1) sqrt(2 ||v||^2_{A(lam)^-1} log(2/delta) / t)."""
    v = np.asarray(v, dtype=float)
    lam = np.asarray(lam, dtype=float)
    support = v != 0
    norm_sq = float(np.sum(v[support] ** 2 / lam[support]))
    return (math.sqrt(2.0 / 3.0) + 1.0) * math.sqrt(2.0 * norm_sq * math.log(2.0 / delta) / t)


@dataclass(eq=False)
class AdmissibleSequence:
    """Nested refinement levels of a hypothesis set under a fixed metric.

    levels[k] holds the indices added at scale k; level 0 is a singleton
    and level k may add at most 2^(2^k) points. cumulative(k) is the union
    of levels 0..k; the final union covers the whole set.
    """

    levels: list
    dist: np.ndarray  # pairwise metric matrix over the set

    def __post_init__(self):
        if len(self.levels[0]) != 1:
            raise ValueError("level 0 must be a singleton")
        for k, lv in enumerate(self.levels[1:], start=1):
            if len(lv) > 2 ** (2**k):
                raise ValueError(f"level {k} exceeds its cardinality cap")

    def cumulative(self, k: int) -> np.ndarray:
        return np.concatenate(self.levels[: k + 1])

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


def pair_distance_matrix(labelings, lam, t: int) -> np.ndarray:
    """||h - h'||_{A(t lam)^-1} for all pairs of rows."""
    G = np.asarray(labelings, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        # distances are only needed on coordinates where rows differ;
        # zero-mass coordinates shared by all rows are harmless
        diff_support = np.any(G != G[0], axis=0)
        if np.any(lam[diff_support] <= 0):
            raise InvalidDesignError("design has no mass on a disagreement coordinate")
        lam = np.where(lam > 0, lam, 1.0)
    W = G / np.sqrt(t * lam)
    sq = (W**2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (W @ W.T)
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def build_admissible_sequence(labelings, lam, t: int, root: int = 0) -> AdmissibleSequence:
    """Farthest-point-greedy admissible sequence under the design metric."""
    m = np.asarray(labelings).shape[0]
    dist = pair_distance_matrix(labelings, lam, t)
    chosen = [root]
    closest = dist[root].copy()
    levels = [np.array([root])]
    k = 0
    while len(chosen) < m:
        k += 1
        cap = 2 ** (2**k)
        batch = []
        while len(chosen) + len(batch) < m and len(batch) < cap:
            nxt = int(np.argmax(closest))
            if closest[nxt] <= 0 and len(chosen) + len(batch) >= m:
                break
            batch.append(nxt)
            closest = np.minimum(closest, dist[nxt])
            closest[nxt] = -1.0
        for b in batch:
            chosen.append(b)
        levels.append(np.array(batch, dtype=int))
    return AdmissibleSequence(levels=levels, dist=dist)


# radius multiplier of the pairwise confidence slabs: the ridge tail bound
# evaluated at the level shift gives 2*(sqrt(2/3)+1)*(u + 2^{k/2})*dist
SLAB_RADIUS_COEFF = 2.0 * (math.sqrt(2.0 / 3.0) + 1.0)


def chaining_estimate(
    labelings,
    log,
    lam,
    delta: float,
    max_sweeps: int = 10_000,
    feas_tol: float = 1e-9,
) -> EtaEstimate:
    """Multi-scale feasibility estimator over a hypothesis subset.

    Builds an admissible sequence, computes a ridge-IPS pair estimate with
    a level-dependent shift for every pair inside each cumulative level,
    and returns a point of the intersection of the induced slabs with
    [-1,1]^n (found by cyclic projection). If the program is infeasible
    within the sweep cap, falls back to the single ridge-IPS vector at the
    diameter scale and flags it.
    """
    G = np.asarray(labelings, dtype=np.int8)
    m, n = G.shape
    if m > 4096:
        raise ValueError("feasibility program capped at 4096 hypotheses")
    lam = np.asarray(lam, dtype=float)
    t = max(len(log), 1)
    counts = np.zeros(n, dtype=int)
    if log:
        np.add.at(counts, [q.index for q in log], 1)
    sums = _pm_sums(log, n)
    u = math.sqrt(math.log(2.0 / delta) / 2.0)

    seq = build_admissible_sequence(G, lam, t)
    diam = float(seq.dist.max())
    s_diam = (math.sqrt(1.0 / 3.0) * (u + 2 ** (seq.depth / 2.0)) / diam) if diam > 0 else 1.0
    fallback = np.clip(sums / (t * lam + s_diam), -1.0, 1.0)

    if m == 1 or diam == 0.0:
        return EtaEstimate(values=(1.0 + fallback) / 2.0, mu=fallback, counts=counts,
                           kind="chaining", t=len(log),
                           flags={"feasible": True, "levels": seq.depth, "sweeps": 0})

    # slab constraints: one per (level k, unordered pair in cumulative(k))
    idx_chunks, val_chunks = [], []
    betas, radii, nsq = [], [], []
    for k in range(1, seq.depth + 1):
        members = seq.cumulative(k)
        level_scale = u + 2 ** (k / 2.0)
        for a_pos in range(len(members)):
            for b_pos in range(a_pos + 1, len(members)):
                i, j = int(members[a_pos]), int(members[b_pos])
                d = seq.dist[i, j]
                if d == 0.0:
                    continue
                v = (G[i] - G[j]).astype(float)
                support = np.flatnonzero(v)
                s_pair = math.sqrt(1.0 / 3.0) * level_scale / d
                mu_pair = sums[support] / (t * lam[support] + s_pair)
                idx_chunks.append(support)
                val_chunks.append(v[support])
                betas.append(float(v[support] @ mu_pair))
                radii.append(SLAB_RADIUS_COEFF * level_scale * d)
                nsq.append(float(support.size))

    all_idx = np.concatenate(idx_chunks)
    all_val = np.concatenate(val_chunks)
    ptr = np.zeros(len(idx_chunks) + 1, dtype=int)
    np.cumsum([c.size for c in idx_chunks], out=ptr[1:])
    betas = np.array(betas)
    radii = np.array(radii)
    nsq = np.array(nsq)

    z = fallback.copy()
    feasible = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        res = np.add.reduceat(all_val * z[all_idx], ptr[:-1]) - betas
        excess = np.abs(res) - radii
        worst = float(excess.max())
        if worst <= feas_tol:
            feasible = True
            break
        for j in np.flatnonzero(excess > feas_tol):
            sl = slice(ptr[j], ptr[j + 1])
            r = float(all_val[sl] @ z[all_idx[sl]]) - betas[j]
            if r > radii[j]:
                z[all_idx[sl]] -= all_val[sl] * ((r - radii[j]) / nsq[j])
            elif r < -radii[j]:
                z[all_idx[sl]] += all_val[sl] * ((-radii[j] - r) / nsq[j])
        np.clip(z, -1.0, 1.0, out=z)
    mu = z if feasible else fallback
    return EtaEstimate(values=(1.0 + mu) / 2.0, mu=mu, counts=counts,
                       kind="chaining", t=len(log),
                       flags={"feasible": feasible, "levels": seq.depth, "sweeps": sweeps})


def err_from_estimate(hclass: HypothesisClass, est: EtaEstimate, h) -> float:
    """Plug-in pool error under eta-hat (no clipping before use)."""
    hv = hclass.labeling(h).astype(float)
    e = est.values
    return float(np.mean(e * (1.0 - hv) + (1.0 - e) * hv))


def estimated_errors_all(hclass: HypothesisClass, est: EtaEstimate) -> np.ndarray:
    """Plug-in error of every hypothesis of an explicit class."""
    e = est.values
    L = hclass.labelings.astype(float)
    return (e.sum() + L @ (1.0 - 2.0 * e)) / hclass.n
