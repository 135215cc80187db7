"""Active-classification algorithms and baselines.

The fixed-confidence eliminator, three fixed-budget variants (the
chaining/IPS form, the oracle-efficient mixed-design form, and the
practical waterfilled form for persistent labels), plus passive,
uniform-disagreement, and streaming importance-weighted baselines.
Every run yields a RunRecord sufficient to replay it bit-for-bit.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import HypothesisClass, ImplicitClassError, Instance
from .design import (
    Design,
    gap_objective,
    oracle_gap_objective,
    pair_width_objective,
    psi_objective,
    sample_unique,
    smd_solve,
    waterfill,
)
from .estimators import (
    EtaEstimate,
    QueryRecord,
    chaining_estimate,
    estimated_errors_all,
    ips_estimate,
    naive_estimate,
)
from .oracles import weighted_max

DEFAULT_SOLVER = {"tol": 1e-3, "rel_tol": 0.1, "b0": 16, "max_iters": 150, "max_batch": 256}


@dataclass(eq=False)
class RunRecord:
    """Full query log plus per-round designs and reports for one run."""

    algorithm: str
    seed: int
    params: dict
    queries: list = field(default_factory=list)
    designs: list = field(default_factory=list)
    eliminations: list = field(default_factory=list)
    progress: list = field(default_factory=list)  # (round, unique queries, hypothesis)
    returned: int = 0
    returned_labeling: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def unique_queried(self) -> int:
        return len({q.index for q in self.queries})

    def to_jsonl(self) -> str:
        payload = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "params": self.params,
            "queries": [[q.round, q.index, q.prob, q.label] for q in self.queries],
            "designs": self.designs,
            "eliminations": self.eliminations,
            "progress": self.progress,
            "returned": self.returned,
            "returned_labeling": self.returned_labeling,
            "flags": self.flags,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_jsonl(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        rec = cls(algorithm=d["algorithm"], seed=d["seed"], params=d["params"])
        rec.queries = [QueryRecord(int(r), int(i), float(p), int(y)) for r, i, p, y in d["queries"]]
        rec.designs = d["designs"]
        rec.eliminations = d["eliminations"]
        rec.progress = [tuple(p) for p in d["progress"]]
        rec.returned = d["returned"]
        rec.returned_labeling = d["returned_labeling"]
        rec.flags = d["flags"]
        return rec


def _content_seed(*parts) -> int:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(p.tobytes())
            h.update(str(p.shape).encode())
        else:
            h.update(repr(p).encode())
    return int.from_bytes(h.digest()[:8], "big")


def _solve_cached(obj, solver_params, cache, key_parts):
    """Solve a design objective; the solver seed derives from the content
    key so cached and recomputed designs are identical."""
    seed = _content_seed(*key_parts)
    if cache is not None:
        key = seed
        hit = cache.get(key)
        if hit is not None:
            return hit
    rep = smd_solve(obj, seed=seed, **solver_params)
    if cache is not None:
        cache[seed] = rep
    return rep


def _record_design(rec, k, rep, extra=None):
    entry = {
        "round": k,
        "lam": [float(x) for x in rep.design.lam],
        "value": rep.value_estimate,
        "certificate": rep.certificate,
        "converged": rep.converged,
    }
    if extra:
        entry.update(extra)
    rec.designs.append(entry)


def _draw_iid(rng, lam, size):
    return rng.choice(lam.size, size=size, p=lam)


def aced_fixed_confidence(
    instance: Instance,
    delta: float,
    c_budget: float = 1.0,
    round_cap: int = 40,
    solver: dict | None = None,
    design_cache: dict | None = None,
    seed: int = 0,
    max_round_queries: int = 1_000_000,
) -> RunRecord:
    """Elimination with per-round optimized designs at confidence delta.

    Each round solves the pair-width design, queries enough samples to
    halve the resolved gap scale, re-estimates with the feasibility
    estimator at delta_k = delta / (2 k^2), and drops every hypothesis
    beaten by more than the current scale. Stops at a singleton or at the
    round cap (then returns the plug-in minimizer, flagged).
    """
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0,1)")
    hclass = instance.hypotheses
    if not hclass.explicit:
        raise ImplicitClassError("fixed-confidence elimination enumerates the class")
    solver_params = dict(DEFAULT_SOLVER, **(solver or {}))
    rec = RunRecord(algorithm="aced_fixed_confidence", seed=seed,
                    params={"delta": delta, "c_budget": c_budget, "round_cap": round_cap})
    H = hclass.labelings
    n = hclass.n
    active = np.arange(H.shape[0])
    est = None
    k = 0
    infeasible_rounds = 0
    while active.size > 1 and k < round_cap:
        k += 1
        delta_k = delta / (2.0 * k * k)
        obj = pair_width_objective(H[active], delta_k)
        rep = _solve_cached(obj, solver_params, design_cache,
                            ("fc", H[active], delta_k, solver_params["tol"]))
        lam = rep.design.lam
        n_k = int(min(max(1, math.ceil(c_budget * rep.value_estimate * 2 ** (2 * (k + 1)))),
                      max_round_queries))
        rng = np.random.default_rng([seed, k])
        idx = _draw_iid(rng, lam, n_k)
        ys = instance.labels.query_many(idx)
        round_log = [QueryRecord(k, int(i), float(lam[i]), int(y)) for i, y in zip(idx, ys)]
        rec.queries.extend(round_log)
        est = chaining_estimate(H[active], round_log, lam, delta_k)
        if not est.flags.get("feasible", True):
            infeasible_rounds += 1
        sub = HypothesisClass(H[active], dedup=False)
        errs = estimated_errors_all(sub, est)
        keep = errs < errs.min() + 2.0 ** (-(k + 1))
        active = active[keep]
        errs = errs[keep]
        _record_design(rec, k, rep, {"N": n_k, "delta_k": delta_k,
                                     "survivors": [int(a) for a in active]})
        rec.eliminations.append(int(active.size))
        best = int(active[int(np.argmin(errs))])
        rec.progress.append((k, rec.unique_queried, best))
    if active.size == 1:
        rec.returned = int(active[0])
        rec.flags["certified"] = True
    else:
        sub = HypothesisClass(H[active], dedup=False)
        errs = estimated_errors_all(sub, est) if est is not None else np.zeros(active.size)
        rec.returned = int(active[int(np.argmin(errs))])
        rec.flags["certified"] = False
        rec.flags["round_cap_hit"] = True
    rec.flags["rounds"] = k
    rec.flags["infeasible_rounds"] = infeasible_rounds
    rec.returned_labeling = [int(v) for v in H[rec.returned]]
    return rec


def _fixed_budget_rounds(T: int, epsilon: float) -> tuple:
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0,1)")
    rounds = int(math.floor(math.log2(1.0 / epsilon)))
    if rounds < 1:
        rounds = 1
    if T < rounds:
        raise ValueError(f"budget {T} smaller than the number of rounds {rounds}")
    return rounds, T // rounds


def _prior_estimate(n: int) -> EtaEstimate:
    """eta-hat_0 = 0 (bandit mu = -1): every hypothesis judged by its size."""
    return EtaEstimate(values=np.zeros(n), mu=-np.ones(n), counts=np.zeros(n, dtype=int),
                       kind="prior", t=0)


def aced_fixed_budget(
    instance: Instance,
    T: int,
    epsilon: float,
    estimator_kind: str = "ips",
    seed: int = 0,
    solver: dict | None = None,
    chaining_delta: float = 0.1,
    design_cache: dict | None = None,
) -> RunRecord:
    """Fixed budget split over floor(log2(1/eps)) rounds of optimized designs.

    Each round anchors at the current plug-in minimizer, solves the
    gap-ratio design at scale 2^(1-k), queries N i.i.d. draws from it and
    re-estimates. The naive estimator pools all labels seen so far; the
    IPS and feasibility estimators use the round's own draws (whose
    probabilities they need).
    """
    if estimator_kind not in ("naive", "ips", "chaining"):
        raise ValueError("estimator_kind must be naive, ips, or chaining")
    hclass = instance.hypotheses
    if not hclass.explicit:
        raise ImplicitClassError("this variant enumerates the class; see the waterfilled one")
    solver_params = dict(DEFAULT_SOLVER, **(solver or {}))
    rounds, N = _fixed_budget_rounds(T, epsilon)
    rec = RunRecord(algorithm="aced_fixed_budget", seed=seed,
                    params={"T": T, "epsilon": epsilon, "estimator_kind": estimator_kind})
    H = hclass.labelings
    n = hclass.n
    est = _prior_estimate(n)
    all_log = []
    for k in range(1, rounds + 1):
        errs = estimated_errors_all(hclass, est)
        anchor = int(np.argmin(errs))
        scale = 2.0 ** (-k + 1)
        obj = gap_objective(H, est.values, anchor, scale, mode="fixed_budget")
        rep = _solve_cached(obj, solver_params, design_cache,
                            ("fb", H, np.asarray(est.values), anchor, scale, solver_params["tol"]))
        lam = rep.design.lam
        rng = np.random.default_rng([seed, k])
        idx = _draw_iid(rng, lam, N)
        ys = instance.labels.query_many(idx)
        round_log = [QueryRecord(k, int(i), float(lam[i]), int(y)) for i, y in zip(idx, ys)]
        rec.queries.extend(round_log)
        all_log.extend(round_log)
        if estimator_kind == "naive":
            est = naive_estimate(all_log, n)
        elif estimator_kind == "ips":
            est = ips_estimate(round_log, n, gamma=0.0)
        else:
            est = chaining_estimate(H, round_log, lam, chaining_delta)
        _record_design(rec, k, rep, {"N": N, "anchor": anchor})
        cur = int(np.argmin(estimated_errors_all(hclass, est)))
        rec.progress.append((k, rec.unique_queried, cur))
    rec.returned = int(np.argmin(estimated_errors_all(hclass, est)))
    rec.returned_labeling = [int(v) for v in H[rec.returned]]
    return rec


def aced_fixed_budget_efficient(
    instance: Instance,
    T: int,
    epsilon: float,
    seed: int = 0,
    solver: dict | None = None,
    design_cache: dict | None = None,
) -> RunRecord:
    """Oracle-friendly fixed budget: mixes the gap design with the
    worst-coordinate design and estimates with plain IPS."""
    hclass = instance.hypotheses
    if not hclass.explicit:
        raise ImplicitClassError("desk-scale variant enumerates the class")
    solver_params = dict(DEFAULT_SOLVER, **(solver or {}))
    rounds, N = _fixed_budget_rounds(T, epsilon)
    rec = RunRecord(algorithm="aced_fixed_budget_efficient", seed=seed,
                    params={"T": T, "epsilon": epsilon})
    H = hclass.labelings
    n = hclass.n
    est = _prior_estimate(n)
    for k in range(1, rounds + 1):
        errs = estimated_errors_all(hclass, est)
        anchor = int(np.argmin(errs))
        scale = 2.0 ** (-k + 1)
        obj1 = gap_objective(H, est.values, anchor, scale, mode="fixed_budget")
        rep1 = _solve_cached(obj1, solver_params, design_cache,
                             ("fbe1", H, np.asarray(est.values), anchor, scale))
        obj2 = psi_objective(H, est.values, anchor, scale, floor_at_scale=False)
        rep2 = _solve_cached(obj2, solver_params, design_cache,
                             ("fbe2", H, np.asarray(est.values), anchor, scale))
        lam = Design(0.5 * (rep1.design.lam + rep2.design.lam)).lam
        rng = np.random.default_rng([seed, k])
        idx = _draw_iid(rng, lam, N)
        ys = instance.labels.query_many(idx)
        round_log = [QueryRecord(k, int(i), float(lam[i]), int(y)) for i, y in zip(idx, ys)]
        rec.queries.extend(round_log)
        est = ips_estimate(round_log, n, gamma=0.0)
        rec.designs.append({
            "round": k, "lam": [float(x) for x in lam],
            "lam_gap": [float(x) for x in rep1.design.lam],
            "lam_psi": [float(x) for x in rep2.design.lam],
            "value_gap": rep1.value_estimate, "value_psi": rep2.value_estimate,
            "N": N, "anchor": anchor,
        })
        cur = int(np.argmin(estimated_errors_all(hclass, est)))
        rec.progress.append((k, rec.unique_queried, cur))
    rec.returned = int(np.argmin(estimated_errors_all(hclass, est)))
    rec.returned_labeling = [int(v) for v in H[rec.returned]]
    return rec


def _erm_handle(hclass, est):
    """Plug-in ERM under eta-hat for explicit or oracle-backed classes."""
    if hclass.explicit:
        idx = int(np.argmin(estimated_errors_all(hclass, est)))
        return idx, hclass.labelings[idx]
    handle, _ = weighted_max(hclass, 2.0 * est.values - 1.0)
    return handle, hclass.labeling(handle)


def aced_waterfilled(
    instance: Instance,
    T: int,
    epsilon: float,
    N_batch: int | None = None,
    seed: int = 0,
    solver: dict | None = None,
    design_cache: dict | None = None,
    line_search_iters: int = 20,
) -> RunRecord:
    """Practical fixed budget for persistent labels.

    Rounds solve the gap design on the running naive estimate, waterfill
    against the cumulative sampling marginals, and query fresh unique
    points only; repeated indices never arise, so the unique-label budget
    T is exact. Pool exhaustion stops the run early, flagged.
    """
    if not instance.labels.persistent:
        raise ValueError("waterfilled variant expects a persistent label model")
    hclass = instance.hypotheses
    solver_params = dict(DEFAULT_SOLVER, **(solver or {}))
    rounds, _ = _fixed_budget_rounds(T, epsilon)
    n = instance.n
    if N_batch is None:
        N_batch = min(250, max(1, n // 4))
    rec = RunRecord(algorithm="aced_waterfilled", seed=seed,
                    params={"T": T, "epsilon": epsilon, "N_batch": N_batch})
    all_log = []
    marginals = []
    queried = set()
    est = naive_estimate([], n)
    exhausted = False
    for k in range(1, rounds + 1):
        handle, anchor_lab = _erm_handle(hclass, est)
        scale = 2.0 ** (-k + 1)
        if hclass.explicit:
            obj = gap_objective(hclass.labelings, est.values, int(handle), scale)
            key = ("wf", hclass.labelings, np.asarray(est.values), int(handle), scale)
        else:
            def maximizer(w):
                h, _ = weighted_max(hclass, w)
                return h, hclass.labeling(h)

            obj = oracle_gap_objective(n, anchor_lab, est.values, scale, maximizer,
                                       line_search_iters)
            key = ("wf-oracle", anchor_lab, np.asarray(est.values), scale)
        rep = _solve_cached(obj, solver_params, design_cache, key)
        p_k = waterfill(rep.design, marginals, k)
        marginals.append(p_k.lam)
        want = min(N_batch, T - len(queried), n - len(queried))
        if want <= 0:
            exhausted = len(queried) >= n
            break
        rng = np.random.default_rng([seed, k])
        fresh, fb = sample_unique(p_k, want, queried, rng=rng)
        if fb:
            rec.flags["sampling_fallback"] = True
        if not fresh:
            exhausted = True
            break
        ys = instance.labels.query_many(fresh)
        round_log = [QueryRecord(k, int(i), float(p_k.lam[i]), int(y)) for i, y in zip(fresh, ys)]
        rec.queries.extend(round_log)
        all_log.extend(round_log)
        queried.update(fresh)
        est = naive_estimate(all_log, n)
        _record_design(rec, k, rep, {"p_k": [float(x) for x in p_k.lam], "N": len(fresh)})
        cur_handle, cur_lab = _erm_handle(hclass, est)
        rec.progress.append((k, len(queried), int(cur_handle) if hclass.explicit else -1))
    handle, lab = _erm_handle(hclass, est)
    rec.returned = int(handle) if hclass.explicit else -1
    rec.returned_labeling = [int(v) for v in lab]
    rec.flags["pool_exhausted"] = exhausted
    return rec


def baseline_passive(instance: Instance, T: int, seed: int = 0) -> RunRecord:
    """Uniform unique draws followed by plug-in ERM on what was observed."""
    n = instance.n
    rec = RunRecord(algorithm="passive", seed=seed, params={"T": T})
    rng = np.random.default_rng([seed, 0])
    take = min(T, n)
    order = rng.permutation(n)[:take]
    log = []
    for step, i in enumerate(order):
        y = instance.labels.query(int(i))
        log.append(QueryRecord(1, int(i), 1.0 / n, int(y)))
    rec.queries = log
    est = naive_estimate(log, n)
    handle, lab = _erm_handle(instance.hypotheses, est)
    rec.returned = int(handle) if instance.hypotheses.explicit else -1
    rec.returned_labeling = [int(v) for v in lab]
    rec.progress.append((1, len(log), rec.returned))
    return rec


def _bernstein_radius(t: int, m: int, delta: float, var_bound: float, weight_bound: float) -> float:
    lg = math.log(2.0 * m * t * (t + 1) / delta)
    return math.sqrt(2.0 * var_bound * lg / t) + weight_bound * lg / (3.0 * t)


def baseline_uniform_disagreement(
    instance: Instance,
    T: int,
    delta: float = 0.1,
    seed: int = 0,
    recompute_every: int = 1,
) -> RunRecord:
    """Uniform sampling on the disagreement region with a Bernstein
    version space and a naive union bound over the class.

    If the budget ends before the version space is a singleton, the run
    is scored by a seeded uniformly-drawn survivor: an elimination
    algorithm's answer is only determined once it has certified one.
    """
    hclass = instance.hypotheses
    if not hclass.explicit:
        raise ImplicitClassError("the version-space baseline enumerates the class")
    H = hclass.labelings
    m, n = H.shape
    rec = RunRecord(algorithm="uniform_disagreement", seed=seed,
                    params={"T": T, "delta": delta})
    rng = np.random.default_rng([seed, 0])
    alive = np.ones(m, dtype=bool)
    cum = np.zeros(m)  # importance-weighted mistake sums
    t = 0
    while t < T:
        sub = H[alive]
        dis = np.flatnonzero(np.any(sub != sub[0], axis=0))
        if dis.size == 0:
            break
        lam_val = 1.0 / dis.size
        block = min(recompute_every, T - t)
        draws = rng.choice(dis, size=block)
        ys = instance.labels.query_many(draws)
        for i, y in zip(draws, ys):
            t += 1
            rec.queries.append(QueryRecord(1, int(i), lam_val, int(y)))
            cum += (H[:, i] != y) / (n * lam_val)
        errs = cum / t
        live_idx = np.flatnonzero(alive)
        best_h = live_idx[int(np.argmin(errs[live_idx]))]
        best = errs[best_h]
        # per-hypothesis Bernstein radius: the variance of one importance
        # weighted loss difference against the empirical best is at most
        # |h (xor) best| * |DIS| / n^2 under uniform mass on DIS
        diff_sizes = (H != H[best_h][None, :]).sum(axis=1)
        lg = math.log(2.0 * m * t * (t + 1) / delta)
        var_bound = diff_sizes * dis.size / (n * n)
        radius = np.sqrt(2.0 * var_bound * lg / t) + (dis.size / n) * lg / (3.0 * t)
        drop = alive & (errs - best > 2.0 * radius)
        if drop.any():
            alive &= ~drop
        rec.eliminations.append(int(alive.sum()))
        live_idx = np.flatnonzero(alive)
        rec.progress.append((1, rec.unique_queried, int(live_idx[np.argmin(errs[live_idx])])))
    survivors = np.flatnonzero(alive)
    if survivors.size == 1:
        rec.returned = int(survivors[0])
        rec.flags["certified"] = True
    else:
        rec.returned = int(rng.choice(survivors))
        rec.flags["certified"] = False
    rec.returned_labeling = [int(v) for v in H[rec.returned]]
    return rec


def _iwal_probability(G: float, k: int, C0: float, aggressiveness: float, p_min: float) -> float:
    s = math.sqrt(C0 * aggressiveness * math.log(max(k, 2)) / max(k - 1, 1))
    if s <= 0:
        return p_min
    if G <= s + s * s:
        return 1.0
    x = (math.sqrt(1.0 + 4.0 * G) - 1.0) / (2.0 * s)
    return max(p_min, min(1.0, 1.0 / (x * x)))


def baseline_iwal(
    instance: Instance,
    stream,
    C0: float,
    variant: str = "iwal0",
    seed: int = 0,
    margin: float = 1e-3,
    p_min: float = 1e-6,
) -> RunRecord:
    """Streaming importance-weighted active learner.

    For each stream point, fit the weighted ERM and the cheapest
    hypothesis forced to flip the prediction there; the loss gap between
    them sets the query probability through the rejection-threshold rule
    with aggressiveness C0 (documented in _iwal_probability; variants
    iwal1/oracular1 halve the slack, oracular variants evaluate the gap
    on all true labels revealed so far instead of importance weights).
    """
    if variant not in ("iwal0", "iwal1", "oracular0", "oracular1"):
        raise ValueError(f"unknown variant {variant!r}")
    hclass = instance.hypotheses
    aggressiveness = 0.5 if variant.endswith("1") else 1.0
    oracular = variant.startswith("oracular")
    rec = RunRecord(algorithm=f"iwal_{variant}", seed=seed,
                    params={"C0": C0, "variant": variant})
    rng = np.random.default_rng([seed, 0])
    n = instance.n
    explicit = hclass.explicit
    if explicit:
        H = hclass.labelings
        m = H.shape[0]
        cum = np.zeros(m)  # weighted mistakes over queried points
        oracle_cum = np.zeros(m)  # unweighted mistakes over all revealed labels
    else:
        from .oracles import WeightedSample, erm_flip_constrained, erm_logistic

        feats = instance.pool.features
        if feats is None:
            raise ValueError("oracle-backed streaming needs pool features")
        samples = []
    revealed = {}
    stream = list(stream)
    for step, i in enumerate(stream, start=1):
        i = int(i)
        if explicit:
            denom = max(step - 1, 1)
            base = oracle_cum if oracular else cum
            hk = int(np.argmin(base))
            flip = np.flatnonzero(H[:, i] != H[hk, i])
            if flip.size == 0:
                rec.progress.append((step, rec.unique_queried, hk))
                continue
            hk_flip = int(flip[np.argmin(base[flip])])
            G = float(base[hk_flip] - base[hk]) / denom
            hk_pred = int(H[hk, i])
        else:
            if samples:
                hyp = erm_logistic(samples)
            else:
                hyp = erm_flip_constrained([], feats[i], +1, margin)
            hk_pred = int(hyp.predict(feats[i])[0])
            desired = -1 if hk_pred == 1 else 1
            flip_hyp = erm_flip_constrained(samples, feats[i], desired, margin)
            assert int(flip_hyp.predict(feats[i])[0]) != hk_pred
            denom = max(step - 1, 1)

            def _loss(h):
                if not samples:
                    return 0.0
                X = np.array([s.example for s in samples])
                w = np.array([s.weight for s in samples])
                y = np.array([s.label for s in samples])
                return float((w * (h.predict(X) != y)).sum()) / denom

            G = max(0.0, _loss(flip_hyp) - _loss(hyp))
        p = _iwal_probability(G, step, C0, aggressiveness, p_min)
        if rng.random() < p:
            y = instance.labels.query(i)
            revealed[i] = y
            rec.queries.append(QueryRecord(step, i, p, int(y)))
            if explicit:
                cum += (H[:, i] != y) / p
            else:
                samples.append(WeightedSample(1.0 / p, feats[i], int(y)))
        if explicit and oracular:
            y_true = revealed.get(i)
            if y_true is None:
                y_true = instance.labels.query(i) if instance.labels.persistent else None
            if y_true is not None:
                revealed[i] = y_true
                oracle_cum += H[:, i] != y_true
        if explicit:
            base = oracle_cum if oracular else cum
            rec.progress.append((step, rec.unique_queried, int(np.argmin(base))))
    if explicit:
        base = oracle_cum if oracular else cum
        rec.returned = int(np.argmin(base))
        rec.returned_labeling = [int(v) for v in H[rec.returned]]
    else:
        hyp = erm_logistic(samples) if samples else erm_flip_constrained([], feats[0], 1, margin)
        rec.returned = -1
        rec.returned_labeling = [int(v) for v in hyp.predict(feats)]
    return rec


REGISTRY = {
    "aced_fixed_confidence": aced_fixed_confidence,
    "aced_fixed_budget": aced_fixed_budget,
    "aced_fixed_budget_efficient": aced_fixed_budget_efficient,
    "aced_waterfilled": aced_waterfilled,
    "passive": baseline_passive,
    "uniform_disagreement": baseline_uniform_disagreement,
    "iwal": baseline_iwal,
}
