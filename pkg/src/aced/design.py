"""Experimental-design objectives on the simplex and their solvers.

The sampling distribution is optimized by stochastic mirror descent
(exponentiated gradient) with adaptive batch doubling, a backtracking
step size, and a first-order optimality certificate. Gap-style
objectives maximize a Gaussian-perturbed excess-error ratio per sample;
pair-width objectives combine a squared Gaussian width with a worst-pair
inverse-mass penalty; the worst-coordinate and inverse-information
objectives are deterministic. Waterfilling reconciles per-round designs
with the cumulative sampling distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LAMBDA_FLOOR = 1e-9


class ObjectiveDegenerateError(RuntimeError):
    """A gap-objective denominator came out nonpositive."""


def floor_simplex(lam, floor: float = LAMBDA_FLOOR) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    total = lam.sum()
    if not np.isfinite(total) or total <= 0:
        return np.full(lam.size, 1.0 / lam.size)
    lam = np.maximum(lam / total, floor)
    lam = np.maximum(lam / lam.sum(), floor)  # renormalization may dip below once
    return lam / lam.sum()


@dataclass(frozen=True, eq=False)
class Design:
    """A sampling distribution on the pool, floored and renormalized."""

    lam: np.ndarray
    floor: float = LAMBDA_FLOOR

    def __post_init__(self):
        lam = floor_simplex(self.lam, self.floor)
        if abs(lam.sum() - 1.0) > 1e-9:
            raise ValueError("design does not normalize")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def uniform(cls, n: int, floor: float = LAMBDA_FLOOR) -> "Design":
        return cls(np.full(n, 1.0 / n), floor)

    @property
    def n(self) -> int:
        return self.lam.size


@dataclass(eq=False)
class DesignObjective:
    """One of the design criteria, with precomputed per-hypothesis data.

    modes:
      fixed_budget     E[max_h (anchor-h) gap ratio], additive scale
      true_gap         same ratio with true gaps floored at epsilon
      fixed_confidence E[max-pair width]^2 + penalty * max-pair inverse mass
      rho              max_h (inverse-information / gap^2), deterministic
      psi              max_{h, i in disagreement} worst-coordinate ratio
    """

    mode: str
    n: int
    V: np.ndarray | None = None        # (m, n) numerator rows, 1/n folded in
    den: np.ndarray | None = None      # (m,) positive denominators
    anchor: int = 0
    P: np.ndarray | None = None        # (pairs, n) pair differences / n
    penalty: float = 0.0
    S: np.ndarray | None = None        # (m, n) 0/1 disagreement supports
    coeff: np.ndarray | None = None    # (m,) rho coefficients
    scale: float = 0.0
    eta: np.ndarray | None = None      # eta-hat for oracle-backed line search
    anchor_labeling: np.ndarray | None = None
    maximizer: object = None           # weighted-max oracle, oracle-backed mode
    line_search_iters: int = 20

    @property
    def stochastic(self) -> bool:
        return self.mode in ("fixed_budget", "true_gap", "fixed_confidence")


def _gap_denominators(labelings, eta, anchor, scale, floor_at_scale):
    """scale + estimated excess error, or true excess floored at scale."""
    L = np.asarray(labelings, dtype=float)
    errs = (eta.sum() + L @ (1.0 - 2.0 * eta)) / L.shape[1]
    gaps = errs - errs[anchor]
    den = np.maximum(gaps, scale) if floor_at_scale else scale + gaps
    if np.any(den[np.arange(len(den)) != anchor] <= 0):
        raise ObjectiveDegenerateError("nonpositive gap denominator")
    den = den.copy()
    den[anchor] = 1.0
    return den


def gap_objective(labelings, eta, anchor: int, scale: float, mode: str = "fixed_budget") -> DesignObjective:
    """Gap-ratio objective anchored at a hypothesis index.

    mode fixed_budget uses denominators scale + plug-in excess error;
    mode true_gap floors the true excess error at scale (= epsilon).
    """
    L = np.asarray(labelings, dtype=float)
    m, n = L.shape
    eta = np.asarray(eta, dtype=float)
    den = _gap_denominators(L, eta, anchor, scale, floor_at_scale=(mode == "true_gap"))
    V = (L[anchor][None, :] - L) / n
    V[anchor] = 0.0
    return DesignObjective(mode=mode, n=n, V=V, den=den, anchor=anchor, scale=scale, eta=eta,
                           anchor_labeling=L[anchor].astype(np.int8))


def oracle_gap_objective(n, anchor_labeling, eta, scale: float, maximizer,
                         line_search_iters: int = 20) -> DesignObjective:
    """Fixed-budget gap objective with the inner max solved by line search."""
    return DesignObjective(mode="fixed_budget", n=n, anchor_labeling=np.asarray(anchor_labeling, np.int8),
                           eta=np.asarray(eta, dtype=float), scale=scale, maximizer=maximizer,
                           line_search_iters=line_search_iters)


def pair_width_objective(labelings, delta: float) -> DesignObjective:
    """Squared pair Gaussian width plus 2 log(1/delta) worst-pair inverse mass."""
    L = np.asarray(labelings, dtype=float)
    m, n = L.shape
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            d = L[i] - L[j]
            if np.any(d):
                pairs.append(d / n)
    if not pairs:
        pairs = [np.zeros(n)]
    return DesignObjective(mode="fixed_confidence", n=n, P=np.array(pairs),
                           penalty=2.0 * math.log(1.0 / delta))


def rho_objective(labelings, eta, epsilon: float, anchor: int) -> DesignObjective:
    """Worst-hypothesis inverse-information-to-gap-squared ratio."""
    L = np.asarray(labelings, dtype=float)
    m, n = L.shape
    errs = (eta.sum() + L @ (1.0 - 2.0 * eta)) / n
    gaps = errs - errs[anchor]
    den = np.maximum(gaps, epsilon)
    S = (L != L[anchor][None, :]).astype(float)
    coeff = np.zeros(m)
    live = np.arange(m) != anchor
    if epsilon <= 0 and np.any(gaps[live] <= 0):
        raise ValueError("rho objective needs positive gaps or a positive epsilon")
    coeff[live] = 1.0 / (n**2 * den[live] ** 2)
    return DesignObjective(mode="rho", n=n, S=S, coeff=coeff, anchor=anchor, scale=epsilon)


def psi_objective(labelings, eta, anchor: int, scale: float, floor_at_scale: bool = True) -> DesignObjective:
    """Worst-coordinate importance-weight objective.

    floor_at_scale gives the diagnostic form max(eps, gap); otherwise the
    in-algorithm form scale + plug-in gap.
    """
    L = np.asarray(labelings, dtype=float)
    den = _gap_denominators(L, np.asarray(eta, dtype=float), anchor, scale, floor_at_scale)
    den[anchor] = np.inf  # no self-term
    S = (L != L[anchor][None, :]).astype(float)
    return DesignObjective(mode="psi", n=L.shape[1], V=None, S=S, den=den, anchor=anchor, scale=scale)


def objective_sample(obj: DesignObjective, design: Design, zeta) -> tuple:
    """One-sample objective value and its maximizer.

    Gap modes return (max_h f, argmax h) with the anchor worth exactly 0;
    the pair-width mode returns the width sample and its pair index;
    deterministic modes ignore zeta.
    """
    lam = design.lam if isinstance(design, Design) else np.asarray(design, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if obj.mode in ("fixed_budget", "true_gap"):
        if obj.maximizer is not None:
            value, lab, _ = line_search_max(lam, zeta, obj.anchor_labeling, obj.eta,
                                            obj.scale, obj.maximizer, obj.line_search_iters)
            return value, lab
        scores = (obj.V @ (zeta / np.sqrt(lam))) / obj.den
        idx = int(np.argmax(scores))
        if scores[idx] <= 0.0:
            return 0.0, obj.anchor
        return float(scores[idx]), idx
    if obj.mode == "fixed_confidence":
        proj = obj.P @ (zeta / np.sqrt(lam))
        idx = int(np.argmax(np.abs(proj)))
        return float(abs(proj[idx])), idx
    if obj.mode == "rho":
        vals = obj.coeff * (obj.S @ (1.0 / lam))
        idx = int(np.argmax(vals))
        return float(vals[idx]), idx
    if obj.mode == "psi":
        ratio = np.where(obj.S > 0, (1.0 / (obj.n * lam))[None, :] / obj.den[:, None], -np.inf)
        h, i = np.unravel_index(np.argmax(ratio), ratio.shape)
        return float(ratio[h, i]), (int(h), int(i))
    raise ValueError(f"unknown objective mode {obj.mode!r}")


def _eval_batch(obj: DesignObjective, lam: np.ndarray, Z: np.ndarray):
    """Per-sample values and gradients for a batch of Gaussian draws.

    Returns (values, grad_mean, grad_sq_mean) where the last two are over
    the batch; deterministic modes get a single exact 'sample'.
    """
    if obj.mode in ("fixed_budget", "true_gap"):
        if obj.maximizer is not None:
            B = Z.shape[0]
            vals = np.empty(B)
            grads = np.empty((B, obj.n))
            inv32 = lam ** (-1.5)
            for s in range(B):
                v, lab, _ = line_search_max(lam, Z[s], obj.anchor_labeling, obj.eta,
                                            obj.scale, obj.maximizer, obj.line_search_iters)
                vals[s] = max(v, 0.0)
                row = (obj.anchor_labeling - lab) / obj.n
                den = obj.scale + float(row @ (2.0 * obj.eta - 1.0))
                den = max(den, obj.scale * 1e-3) if obj.scale > 0 else max(den, 1e-12)
                grads[s] = -0.5 * row * Z[s] * inv32 / den if vals[s] > 0 else 0.0
            return vals, grads.mean(axis=0), (grads**2).mean(axis=0)
        Zs = Z / np.sqrt(lam)
        scores = (obj.V @ Zs.T) / obj.den[:, None]
        rows = np.argmax(scores, axis=0)
        vals = scores[rows, np.arange(Z.shape[0])]
        neg = vals <= 0
        rows[neg] = obj.anchor
        vals = np.maximum(vals, 0.0)
        W = obj.V[rows] / obj.den[rows][:, None]
        grads = -0.5 * W * Z * (lam ** (-1.5))
        return vals, grads.mean(axis=0), (grads**2).mean(axis=0)
    if obj.mode == "fixed_confidence":
        Zs = Z / np.sqrt(lam)
        proj = obj.P @ Zs.T
        rows = np.argmax(np.abs(proj), axis=0)
        signs = np.sign(proj[rows, np.arange(Z.shape[0])])
        vals = np.abs(proj[rows, np.arange(Z.shape[0])])
        W = obj.P[rows] * signs[:, None]
        grads = -0.5 * W * Z * (lam ** (-1.5))
        return vals, grads.mean(axis=0), (grads**2).mean(axis=0)
    if obj.mode == "rho":
        vals = obj.coeff * (obj.S @ (1.0 / lam))
        r = int(np.argmax(vals))
        active = vals >= vals[r] - 1e-12 * max(abs(vals[r]), 1.0)
        g = -(obj.coeff[active, None] * obj.S[active]).mean(axis=0) / lam**2
        return np.array([vals[r]]), g, g**2
    if obj.mode == "psi":
        ratio = np.where(obj.S > 0, (1.0 / (obj.n * lam))[None, :] / obj.den[:, None], -np.inf)
        best = float(ratio.max())
        g = np.zeros(obj.n)
        hs, cols = np.nonzero(ratio >= best - 1e-12 * max(best, 1.0))
        for h, i in zip(hs, cols):
            g[i] -= (1.0 / (obj.n * lam[i] ** 2)) / obj.den[h] / hs.size
        return np.array([best]), g, g**2
    raise ValueError(f"unknown objective mode {obj.mode!r}")


_CERT_BANDS = (0.0, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2)


def _banded_certificate(obj: DesignObjective, lam: np.ndarray, value: float) -> float:
    """Optimality certificate for the deterministic modes.

    Averaging subgradients over an eps-active band gives an
    eps-subgradient, so gap + band slack still upper-bounds the true
    suboptimality; near symmetric optima the averaged gradient is far
    less sparse than the argmax one and certifies much tighter.
    """
    best = np.inf
    if obj.mode == "rho":
        vals = obj.coeff * (obj.S @ (1.0 / lam))
        for band in _CERT_BANDS:
            cut = value * (1.0 - band) - 1e-15
            active = vals >= cut
            g = -(obj.coeff[active, None] * obj.S[active]).mean(axis=0) / lam**2
            slack = value - float(vals[active].min())
            best = min(best, float(g @ lam - g.min()) + slack)
        return best
    if obj.mode == "psi":
        # each active pair's subgradient lives on one coordinate, so the
        # dual combination must spread weight evenly across coordinates
        ratio = np.where(obj.S > 0, (1.0 / (obj.n * lam))[None, :] / obj.den[:, None], -np.inf)
        col_best = ratio.max(axis=0)  # most binding hypothesis per coordinate
        for band in _CERT_BANDS:
            cut = value * (1.0 - band) - 1e-15
            cols = np.flatnonzero(col_best >= cut)
            if cols.size == 0:
                continue
            g = np.zeros(obj.n)
            g[cols] = -col_best[cols] / (lam[cols] * cols.size)
            slack = value - float(col_best[cols].min())
            best = min(best, float(g @ lam - g.min()) + slack)
        return best
    raise ValueError(f"no deterministic certificate for mode {obj.mode!r}")


def _penalty_term(obj, lam):
    if obj.mode != "fixed_confidence":
        return 0.0, np.zeros(obj.n)
    mass = (obj.P**2) @ (1.0 / lam)
    p = int(np.argmax(mass))
    grad = -(obj.P[p] ** 2) / lam**2
    return float(mass[p]), grad


def _objective_value(obj, lam, vals):
    if obj.mode == "fixed_confidence":
        m, _ = _penalty_term(obj, lam)
        return float(np.mean(vals)) ** 2 + obj.penalty * m
    return float(np.mean(vals))


def _mirror_step(lam, g, step, lam_floor):
    u = np.log(lam) - step * g
    u -= u.max()  # scale-invariant; keeps exp finite
    return floor_simplex(np.exp(u), lam_floor)


@dataclass(eq=False)
class SolverReport:
    """Mirror-descent output: design, value with spread, and certificate."""

    design: Design
    value_estimate: float
    value_stderr: float
    certificate: float
    batch_trajectory: list
    iterations: int
    converged: bool


def _combined_gradient(obj, lam, vals, grad_mean, grad_sq_mean, B):
    if obj.mode == "fixed_confidence":
        m, gpen = _penalty_term(obj, lam)
        wbar = float(np.mean(vals))
        g = 2.0 * wbar * grad_mean + obj.penalty * gpen
        var = (2.0 * wbar) ** 2 * np.maximum(grad_sq_mean - grad_mean**2, 0.0) / max(B, 1)
    else:
        g = grad_mean
        var = np.maximum(grad_sq_mean - grad_mean**2, 0.0) / max(B, 1)
    if not obj.stochastic:
        var = np.zeros_like(var)
    return g, var


def smd_solve(
    obj: DesignObjective,
    tol: float,
    b0: int = 16,
    seed: int = 0,
    max_iters: int = 100_000,
    lam_floor: float = LAMBDA_FLOOR,
    max_halvings: int = 30,
    eval_samples: int = 512,
    rel_tol: float = 0.0,
    max_batch: int = 1 << 16,
) -> SolverReport:
    """Minimize a design objective over the simplex by mirror descent.

    Exponentiated-gradient updates from the uniform design; the batch
    size doubles whenever gradient noise dominates the first-order gap;
    the step size backtracks (two steps tie when the value difference is
    within one standard error on common draws); stops when the
    certificate 2 max_k sigma_k + max_k <g, lam - e_k> drops below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = obj.n
    lam = np.full(n, 1.0 / n)
    B = max(int(b0), 2) if obj.stochastic else 1
    step = 1.0
    batch_trajectory = []
    best = (np.inf, lam.copy(), np.inf)
    counter = 0
    converged = False
    cert = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        if obj.stochastic:
            rng = np.random.default_rng([seed, counter])
            counter += 1
            Z = rng.standard_normal((B, n))
        else:
            Z = np.zeros((1, n))
        vals, gmean, gsq = _eval_batch(obj, lam, Z)
        g, gvar = _combined_gradient(obj, lam, vals, gmean, gsq, B)
        sigma_max = float(np.sqrt(gvar.max())) if obj.stochastic else 0.0
        gap_term = float(g @ lam - g.min())
        value = _objective_value(obj, lam, vals)
        if obj.stochastic:
            cert = 2.0 * sigma_max + gap_term
        else:
            cert = min(gap_term, _banded_certificate(obj, lam, value))
        batch_trajectory.append(B)
        if value < best[0]:
            best = (value, lam.copy(), cert)
        if cert <= tol + rel_tol * abs(value):
            converged = True
            break
        if obj.stochastic and 2.0 * sigma_max >= gap_term:
            B = min(2 * B, max_batch)
        # backtracking exponentiated step on common draws
        trial = min(1.0, 2.0 * step) if it > 1 else 1.0
        accepted = False
        for _ in range(max_halvings):
            cand = _mirror_step(lam, g, trial, lam_floor)
            cvals, _, _ = _eval_batch(obj, cand, Z)
            diff = _objective_value(obj, cand, cvals) - value
            if obj.stochastic:
                se = float(np.std(cvals - vals) / math.sqrt(max(B, 1)))
                if obj.mode == "fixed_confidence":
                    se *= 2.0 * max(float(np.mean(vals)), float(np.mean(cvals)))
                ok = diff <= se
            else:
                ok = diff <= 0.0
            if ok:
                lam = cand
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            lam = _mirror_step(lam, g, trial, lam_floor)
        step = trial
    if not converged and best[0] < np.inf:
        _, lam, cert = best
    # dedicated evaluation at the returned design; oracle-backed objectives
    # pay one inner line search per sample, so keep that batch small
    if obj.stochastic:
        if getattr(obj, "maximizer", None) is not None:
            eval_samples = min(eval_samples, 32)
        rng = np.random.default_rng([seed, 1 << 30])
        Z = rng.standard_normal((max(B, eval_samples), n))
        vals, _, _ = _eval_batch(obj, lam, Z)
        value = _objective_value(obj, lam, vals)
        if obj.mode == "fixed_confidence":
            wbar = float(np.mean(vals))
            stderr = 2.0 * wbar * float(np.std(vals) / math.sqrt(vals.size))
        else:
            stderr = float(np.std(vals) / math.sqrt(vals.size))
    else:
        vals, _, _ = _eval_batch(obj, lam, np.zeros((1, n)))
        value = _objective_value(obj, lam, vals)
        stderr = 0.0
    return SolverReport(design=Design(lam, lam_floor), value_estimate=value,
                        value_stderr=stderr, certificate=float(cert),
                        batch_trajectory=batch_trajectory, iterations=it,
                        converged=converged)


def line_search_max(lam, zeta, anchor_labeling, eta_hat, scale, maximizer, n_max: int = 20):
    """Inner maximization of the gap ratio through a weighted-max oracle.

    Multi-scale search over the slack variable r: halve while the
    constraint value is negative, then alternately grow by gamma or
    shrink by gamma^2 while refining gamma, collecting every oracle
    answer; the best collected hypothesis under the ratio is returned.
    Starts from r=100, gamma=10, refinement sqrt(2). The anchor seeds the
    candidate set so the returned value is never below its zero.
    """
    lam = np.asarray(lam, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    anchor = np.asarray(anchor_labeling, dtype=float)
    eta_hat = np.asarray(eta_hat, dtype=float)
    n = lam.size
    d = -zeta / (n * np.sqrt(lam))
    c = (1.0 - 2.0 * eta_hat) / n
    b = -float(d @ anchor)
    a = -scale - float(c @ anchor)
    cands = [(anchor, None)]

    def oracle_step(r):
        w = c * r + d
        handle, lab = maximizer(w)
        ghat = a * r + b + float(w @ lab)
        cands.append((np.asarray(lab, dtype=float), handle))
        return ghat

    r, gamma, refine = 100.0, 10.0, math.sqrt(2.0)
    t = 0
    ghat = oracle_step(r)
    while ghat < 0 and t < n_max:
        r /= 2.0
        ghat = oracle_step(r)
        t += 1
    for _ in range(t, n_max):
        ghat = oracle_step(r)
        if ghat > 0:
            r *= gamma
        else:
            r /= gamma**2
            gamma /= refine

    best_val, best_lab, best_handle = 0.0, anchor, None
    for lab, handle in cands:
        num = float(d @ (lab - anchor))
        den = scale + float(c @ (lab - anchor))
        if den <= 0:
            den = max(den, scale * 1e-3 if scale > 0 else 1e-12)
        val = 0.0 if np.array_equal(lab, anchor) else num / den
        if val > best_val:
            best_val, best_lab, best_handle = val, lab, handle
    return best_val, best_lab.astype(np.int8), best_handle


def waterfill(lam_k, prior_marginals, k: int) -> Design:
    """Round-k sampling distribution matching the cumulative target design.

    Minimizes over the simplex the worst residual deficit
    max_j max(0, k*lam_kj - sum_i p_ij - q_j): deficits are covered
    exactly when they fit in one unit of mass (surplus spread by flooding
    the low coordinates to a common level), otherwise the largest
    deficits are shaved to a common water level.
    """
    lam_k = lam_k.lam if isinstance(lam_k, Design) else np.asarray(lam_k, dtype=float)
    if k < 1:
        raise ValueError("round index must be >= 1")
    priors = list(prior_marginals)
    if k == 1 or not priors:
        return Design(lam_k)
    consumed = np.sum([p.lam if isinstance(p, Design) else np.asarray(p, float) for p in priors], axis=0)
    d = np.maximum(0.0, k * lam_k - consumed)
    total = float(d.sum())
    if total <= 1.0:
        lo, hi = 0.0, 1.0
        for _ in range(80):
            w = 0.5 * (lo + hi)
            if np.maximum(d, w).sum() > 1.0:
                hi = w
            else:
                lo = w
        q = np.maximum(d, lo)
    else:
        lo, hi = 0.0, float(d.max())
        for _ in range(80):
            th = 0.5 * (lo + hi)
            if np.maximum(d - th, 0.0).sum() > 1.0:
                lo = th
            else:
                hi = th
        q = np.maximum(d - hi, 0.0)
    s = q.sum()
    q = q / s if s > 0 else np.full_like(d, 1.0 / d.size)
    return Design(q)


def sample_unique(p, N: int, already_queried, seed=0, rng=None) -> tuple:
    """Draw until N distinct previously-unqueried indices are collected.

    Rejection-samples from p, returning indices in draw order. If fewer
    than the needed number of unqueried indices carry mass, the remainder
    is drawn uniformly from the unqueried indices and the fallback flag
    is set.
    """
    lam = p.lam if isinstance(p, Design) else floor_simplex(np.asarray(p, dtype=float))
    n = lam.size
    rng = rng if rng is not None else np.random.default_rng(seed)
    seen = np.zeros(n, dtype=bool)
    seen[list(already_queried)] = True
    out = []
    fallback = False
    mass_floor = 10.0 * LAMBDA_FLOOR
    while len(out) < N:
        available = ~seen & (lam > mass_floor)
        if not available.any():
            fallback = True
            rest = np.flatnonzero(~seen)
            if rest.size == 0:
                break
            take = min(N - len(out), rest.size)
            picks = rng.choice(rest, size=take, replace=False)
            for i in picks:
                out.append(int(i))
                seen[i] = True
            if len(out) < N:
                break
            continue
        draws = rng.choice(n, size=max(4 * (N - len(out)), 16), p=lam)
        for i in draws:
            if not seen[i]:
                out.append(int(i))
                seen[i] = True
                if len(out) == N:
                    break
    return out, fallback
