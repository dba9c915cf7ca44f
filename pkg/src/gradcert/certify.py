"""Numerical certification: constant estimation, bound checking, rate fitting.

Estimators recover the secant constant nu and the restricted gradient
Lipschitz constant R from samples; `check_bounds` replays a solver trace
against one displayed per-iteration inequality; `fit_rate` extracts
empirical geometric/sublinear rates; `appendix_grid` verifies the
(theta, h) stepsize optimization on a grid.

All inequality checks use a multiplicative slack of 1 + 1e-9 so verdicts
are scale-free across problems of different magnitudes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .numkit import GaussianStream
from .oracles import Objective
from .solvers import SolverConfig, SolverTrace

__all__ = [
    "ConstantEstimate",
    "BoundReport",
    "RateFit",
    "GridOptimum",
    "estimate_rsi",
    "estimate_rlg",
    "check_bounds",
    "converse_secant",
    "fit_rate",
    "appendix_grid",
    "THEOREM_IDS",
]

SLACK = 1e-9
_TINY = 1e-300

THEOREM_IDS = (
    "thm1_sublinear",
    "thm2_linear",
    "thm2_converse",
    "thm3_linear",
    "thm4_accel",
    "thm6_restart",
    "thm8_augl1",
    "lemma1_part2",
    "lemma2_combined",
    "lemma3_growth",
)


@dataclass(frozen=True)
class ConstantEstimate:
    """A sampled curvature constant with the witness achieving it.

    ``method`` is "projection_ratio" (secant constant from projection
    ratios), "segment_sampling" (gradient ratios on descent segments; a
    lower-bound witness by construction), or "contraction_converse"
    (secant constant implied by an observed contraction).
    """

    value: float
    witness: np.ndarray | tuple[np.ndarray, np.ndarray]
    method: str
    samples_used: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.value) and self.value > 0):
            raise ValueError(f"estimated constant must be finite and positive, got {self.value}")


@dataclass(frozen=True)
class BoundReport:
    """Verdict of one per-iteration bound check."""

    theorem_id: str
    passed: bool
    max_violation: float
    first_fail_k: int | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "theorem_id": self.theorem_id,
                "pass": self.passed,
                "max_violation": self.max_violation,
                "first_fail_k": self.first_fail_k,
            }
        )


@dataclass(frozen=True)
class RateFit:
    """Least-squares rate fit on a gap curve.

    For "linear_geometric" the factor is the per-iteration contraction
    rho = exp(slope of log gap vs k); for the sublinear models it is the
    slope of log gap vs log k. ``window`` is the (k_start, k_end) actually
    used; ``truncated`` marks a window shrunk to its positive-gap prefix.
    """

    model: str
    fitted_factor: float
    r_squared: float
    window: tuple[int, int]
    truncated: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model,
                "fitted_factor": self.fitted_factor,
                "r_squared": self.r_squared,
                "window": list(self.window),
                "truncated": self.truncated,
            }
        )


@dataclass(frozen=True)
class GridOptimum:
    """Result of the (theta, h) contraction-factor grid search."""

    theta_star: float
    h_star: float
    min_value: float
    case_a_value: float
    case_b_value: float


# ---------------------------------------------------------------------------
# sampling helpers


def _box(domain, dim: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = domain
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64).ravel(), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64).ravel(), (dim,)).copy()
    if not np.all(hi > lo):
        raise ValueError("sampling box must have hi > lo in every coordinate")
    return lo, hi


def _sample_points(oracle: Objective, domain, n: int, seed: int) -> np.ndarray:
    """n sample points in the box: a uniform grid in 1-D, uniform draws else."""
    lo, hi = _box(domain, oracle.dim)
    if oracle.dim == 1:
        return np.linspace(lo[0], hi[0], n).reshape(-1, 1)
    u = GaussianStream(seed).uniform(n * oracle.dim).reshape(n, oracle.dim)
    return lo + u * (hi - lo)


def _eval_batch(oracle: Objective, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if oracle.eval_batch is not None:
        vals, grads = oracle.eval_batch(pts)
        return np.asarray(vals, dtype=np.float64), np.asarray(grads, dtype=np.float64)
    vals = np.empty(pts.shape[0])
    grads = np.empty_like(pts)
    for i, p in enumerate(pts):
        vals[i], grads[i] = oracle.eval(p)
    return vals, grads


def _project_batch(oracle: Objective, pts: np.ndarray) -> np.ndarray:
    prj = np.asarray(oracle.project(pts), dtype=np.float64)
    if prj.shape != pts.shape:  # projection that only handles single points
        prj = np.stack([np.asarray(oracle.project(p), dtype=np.float64) for p in pts])
    return prj


# ---------------------------------------------------------------------------
# constant estimators


def estimate_rsi(oracle: Objective, domain, n_samples: int, seed: int = 0) -> ConstantEstimate:
    """Sampled secant constant: min over x of <grad f(x), x-x_prj>/||x-x_prj||^2.

    Samples with ``||x - x_prj|| <= 1e-8`` (inside or hugging the solution
    set) and samples with non-finite gradients are excluded. The sampled
    minimum can only over-estimate the true infimum.
    """
    if oracle.project is None:
        raise ValueError("secant estimation needs an oracle with a projection")
    if n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {n_samples}")
    pts = _sample_points(oracle, domain, n_samples, seed)
    _, grads = _eval_batch(oracle, pts)
    prj = _project_batch(oracle, pts)
    diff = pts - prj
    dn = np.linalg.norm(diff, axis=1)
    finite = np.all(np.isfinite(grads), axis=1)
    mask = (dn > 1e-8) & finite
    if not mask.any():
        raise ValueError("no sample fell outside the solution set; cannot estimate")
    ratios = np.einsum("ij,ij->i", grads[mask], diff[mask]) / dn[mask] ** 2
    i = int(np.argmin(ratios))
    return ConstantEstimate(
        value=float(ratios[i]),
        witness=pts[mask][i].copy(),
        method="projection_ratio",
        samples_used=int(mask.sum()),
    )


def _pair_ratios(xa, xb, ga, gb) -> np.ndarray:
    dn = np.linalg.norm(xa - xb, axis=1)
    gn = np.linalg.norm(ga - gb, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(dn > 1e-12, gn / dn, -np.inf)
    return r


def estimate_rlg(oracle: Objective, domain, n_samples: int, seed: int = 0) -> ConstantEstimate:
    """Sampled restricted gradient-Lipschitz constant (a lower-bound witness).

    Starts from the max pairwise gradient ratio on the sample cloud, then
    repeatedly sharpens it with gradient ratios between random point pairs
    on the descent segments from z to ``z - (1/R) grad f(z)``, keeping a
    running max until the value stops growing (relative 1e-6) or 50 sweeps.
    Because R is a running max over nested sample sets, more samples never
    decrease the estimate.
    """
    if n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {n_samples}")
    z = _sample_points(oracle, domain, n_samples, seed)
    _, gz = _eval_batch(oracle, z)
    if not np.all(np.isfinite(gz)):
        bad = z[~np.all(np.isfinite(gz), axis=1)][0]
        raise ArithmeticError(f"gradient blow-up at sample z = {bad}")

    # pairwise initialization on a prefix of the cloud (all pairs, chunked)
    p = min(n_samples, 1024)
    best = -np.inf
    witness: tuple[np.ndarray, np.ndarray] | None = None
    for i in range(p - 1):
        ratios = _pair_ratios(
            np.broadcast_to(z[i], (p - i - 1, z.shape[1])),
            z[i + 1 : p],
            np.broadcast_to(gz[i], (p - i - 1, z.shape[1])),
            gz[i + 1 : p],
        )
        j = int(np.argmax(ratios))
        if ratios[j] > best:
            best = float(ratios[j])
            witness = (z[i].copy(), z[i + 1 + j].copy())
    if not np.isfinite(best) or best <= 0:
        raise ValueError("no usable gradient ratio in the sample cloud")

    stream = GaussianStream(seed).split(0x5E6)
    pairs_per_z = 32
    value = best
    for _ in range(50):
        # endpoints z - (u / R) grad f(z) for two fresh u in [0, 1] per pair
        u = stream.uniform(2 * pairs_per_z * n_samples).reshape(2, pairs_per_z, n_samples, 1)
        seg = gz / value
        xa = (z[None, :, :] - u[0] * seg[None, :, :]).reshape(-1, z.shape[1])
        xb = (z[None, :, :] - u[1] * seg[None, :, :]).reshape(-1, z.shape[1])
        _, ga = _eval_batch(oracle, xa)
        _, gb = _eval_batch(oracle, xb)
        if not (np.all(np.isfinite(ga)) and np.all(np.isfinite(gb))):
            bad = xa[~np.all(np.isfinite(ga), axis=1)]
            zbad = bad[0] if bad.size else xb[~np.all(np.isfinite(gb), axis=1)][0]
            raise ArithmeticError(f"gradient blow-up on a segment near {zbad}")
        ratios = _pair_ratios(xa, xb, ga, gb)
        j = int(np.argmax(ratios))
        new_value = value
        if np.isfinite(ratios[j]) and ratios[j] > value:
            new_value = float(ratios[j])
            witness = (xa[j].copy(), xb[j].copy())
        if abs(new_value - value) <= 1e-6 * value:
            value = new_value
            break
        value = new_value
    return ConstantEstimate(
        value=value,
        witness=witness,
        method="segment_sampling",
        samples_used=n_samples,
    )


# ---------------------------------------------------------------------------
# bound checking


def _violations(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Scale-free violations of lhs <= rhs (negative or ~0 means satisfied)."""
    return (lhs - rhs) / np.maximum(np.abs(rhs), _TINY)


def _report(theorem_id: str, viol: np.ndarray, ks: np.ndarray) -> BoundReport:
    if viol.size == 0:
        return BoundReport(theorem_id, True, 0.0, None)
    max_v = float(np.max(viol))
    if max_v <= SLACK:
        return BoundReport(theorem_id, True, max_v, None)
    first = int(ks[int(np.argmax(viol > SLACK))])
    return BoundReport(theorem_id, False, max_v, first)


def _need(trace: SolverTrace, oracle: Objective, *, dist=False, gap=False, iterates=False):
    if dist and trace.dist_to_sol is None:
        raise ValueError("check needs dist_to_sol (oracle projection) in the trace")
    if gap and trace.f_star is None and oracle.f_star is None:
        raise ValueError("check needs a known f_star")
    if iterates and trace.iterates is None:
        raise ValueError("check needs stored iterates (run with keep_iterates=True)")


def _gap_of(trace: SolverTrace, oracle: Objective) -> np.ndarray:
    f_star = trace.f_star if trace.f_star is not None else oracle.f_star
    return trace.f - f_star


def _constant(oracle: Objective, *names: str) -> float:
    for name in names:
        v = getattr(oracle.constants, name)
        if v is not None:
            return v
    raise ValueError(f"oracle {oracle.name!r} lacks required constant {names[0]}")


def _regrad(trace: SolverTrace, oracle: Objective) -> np.ndarray:
    pts = np.stack(trace.iterates)
    _, grads = _eval_batch(oracle, pts)
    return grads


def check_bounds(
    trace: SolverTrace, oracle: Objective, theorem_id: str, cfg: SolverConfig
) -> BoundReport:
    """Check one displayed per-iteration inequality along a trace.

    Supported ids and the inequality each verifies (slack 1 + 1e-9):

    * thm1_sublinear:  gap_k <= 1 / (1/gap_0 + k a(2-a)/(2 R r_0^2)), a = hR
    * thm2_linear:     r_{k+1} <= sqrt(1 - nu/(2R)) r_k   (while r_k >= 1e-12)
    * thm2_converse:   secant inequality with nu = delta/(2h) from the
      observed contraction (see `converse_secant`)
    * thm3_linear:     r_{k+1} <= sqrt(1 - nu/L) r_k
    * thm4_accel:      gap_k <= 4 R r_1^2 / (k+1)^2  for k >= 1
    * thm6_restart:    gap at epoch j <= e^-j gap_0 (epoch length from cfg)
    * thm8_augl1:      dual gap decays geometrically; the unknown dual f* is
      surrogated by the best value seen, and the verdict is a terminal-window
      geometric fit with rho < 1 and r^2 > 0.95
    * lemma1_part2:    ||g_k||^2/(2R) <= <g_k, x_k - x_prj>
    * lemma2_combined: <g_k, x_k-x_prj> >= ||g_k||^2/(4R) + (nu/2) r_k^2
    * lemma3_growth:   gap_k >= (nu/2) r_k^2

    Iterates inside the solution set (r_k below 1e-12) and bound values
    below the objective's floating-point resolution are vacuous and skipped;
    a trace that starts at the optimum passes trivially.
    """
    if theorem_id not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id {theorem_id!r}")
    r = trace.dist_to_sol
    ks = trace.k

    if theorem_id == "thm1_sublinear":
        _need(trace, oracle, dist=True, gap=True)
        big_r = _constant(oracle, "R", "L")
        alpha = cfg.stepsize_h * big_r
        if not 0 < alpha <= 1 + 1e-12:
            raise ValueError(f"thm1 needs h in (0, 1/R]; got h*R = {alpha}")
        gap = _gap_of(trace, oracle)
        if gap[0] <= 0 or r[0] <= 1e-12:
            # started at the optimum: nothing checkable
            return _report(theorem_id, np.empty(0), ks)
        c = alpha * (2.0 - alpha) / (2.0 * big_r * r[0] ** 2)
        bound = 1.0 / (1.0 / gap[0] + ks * c)
        valid = bound >= gap[0] * 1e-15  # below fp resolution the bound is vacuous
        return _report(theorem_id, _violations(gap[valid], bound[valid]), ks[valid])

    if theorem_id in ("thm2_linear", "thm3_linear"):
        _need(trace, oracle, dist=True)
        nu = _constant(oracle, "nu")
        if theorem_id == "thm2_linear":
            denom = 2.0 * _constant(oracle, "R", "L")
        else:
            denom = _constant(oracle, "L")
        if nu >= denom:
            raise ValueError(f"invalid constants: nu = {nu} >= {denom}")
        rho = math.sqrt(1.0 - nu / denom)
        valid = r[:-1] >= 1e-12
        viol = _violations(r[1:][valid], rho * r[:-1][valid])
        return _report(theorem_id, viol, ks[1:][valid])

    if theorem_id == "thm2_converse":
        nu_hat, viol, ks_used = _converse_data(trace, oracle, cfg.stepsize_h)[2:]
        return _report(theorem_id, viol, ks_used)

    if theorem_id == "thm4_accel":
        _need(trace, oracle, dist=True, gap=True)
        big_r = _constant(oracle, "R", "L")
        if len(trace) < 2:
            raise ValueError("thm4 check needs at least two records")
        gap = _gap_of(trace, oracle)
        r1 = r[1]
        if r1 <= 1e-12:
            return _report(theorem_id, np.empty(0), ks)
        bound = 4.0 * big_r * r1**2 / (ks[1:] + 1.0) ** 2
        return _report(theorem_id, _violations(gap[1:], bound), ks[1:])

    if theorem_id == "thm6_restart":
        _need(trace, oracle, gap=True)
        if cfg.restart_every is None:
            raise ValueError("thm6 check needs cfg.restart_every")
        gap = _gap_of(trace, oracle)
        epochs = np.arange(len(trace) // cfg.restart_every + 1)
        boundary = epochs * cfg.restart_every
        boundary = boundary[boundary < len(trace)]
        epochs = epochs[: boundary.size]
        if gap[0] <= 0:
            return _report(theorem_id, np.empty(0), boundary)
        bound = np.exp(-epochs.astype(float)) * gap[0]
        valid = bound >= gap[0] * 1e-15
        return _report(theorem_id, _violations(gap[boundary][valid], bound[valid]), boundary[valid])

    if theorem_id == "thm8_augl1":
        fit = _terminal_geometric_fit(trace)
        passed = fit.fitted_factor < 1.0 and fit.r_squared > 0.95
        return BoundReport(theorem_id, passed, fit.fitted_factor - 1.0, None)

    if theorem_id == "lemma1_part2":
        _need(trace, oracle, dist=True, iterates=True)
        big_r = _constant(oracle, "R", "L")
        grads = _regrad(trace, oracle)
        pts = np.stack(trace.iterates)
        prj = _project_batch(oracle, pts)
        inner = np.einsum("ij,ij->i", grads, pts - prj)
        lhs = np.einsum("ij,ij->i", grads, grads) / (2.0 * big_r)
        valid = r >= 1e-12
        return _report(theorem_id, _violations(lhs[valid], inner[valid]), ks[valid])

    if theorem_id == "lemma2_combined":
        _need(trace, oracle, dist=True, iterates=True)
        big_r = _constant(oracle, "R", "L")
        nu = _constant(oracle, "nu")
        grads = _regrad(trace, oracle)
        pts = np.stack(trace.iterates)
        prj = _project_batch(oracle, pts)
        inner = np.einsum("ij,ij->i", grads, pts - prj)
        combo = np.einsum("ij,ij->i", grads, grads) / (4.0 * big_r) + 0.5 * nu * r**2
        valid = r >= 1e-12
        return _report(theorem_id, _violations(combo[valid], inner[valid]), ks[valid])

    # lemma3_growth
    _need(trace, oracle, dist=True, gap=True)
    nu = _constant(oracle, "nu")
    gap = _gap_of(trace, oracle)
    valid = r >= 1e-12
    viol = _violations(0.5 * nu * r[valid] ** 2, gap[valid])
    return _report(theorem_id, viol, ks[valid])


def _terminal_geometric_fit(trace: SolverTrace) -> RateFit:
    """Geometric fit on the terminal half of the positive-gap prefix.

    Uses the best objective value seen as the f_star surrogate when the
    trace carries none (the surrogate's own record necessarily drops out
    of the positive prefix).
    """
    f_star = trace.f_star if trace.f_star is not None else float(np.min(trace.f))
    gap = trace.f - f_star
    positive = np.nonzero(gap <= 0)[0]
    end = int(positive[0]) - 1 if positive.size else len(trace) - 1
    if end < 1:
        raise ValueError("no positive-gap prefix to fit")
    start = end // 2
    return fit_rate(trace, "linear_geometric", (start, end), f_star=f_star)


def _converse_data(trace: SolverTrace, oracle: Objective, h: float):
    if oracle.project is None:
        raise ValueError("converse check needs an oracle with a projection")
    _need(trace, oracle, dist=True, iterates=True)
    if h <= 0:
        raise ValueError(f"stepsize must be positive, got {h}")
    r = trace.dist_to_sol
    valid = r[:-1] > 1e-8  # degenerate samples excluded from ratio estimation
    if not valid.any():
        raise ValueError("trace has no usable contraction ratios")
    ratios_sq = (r[1:][valid] / r[:-1][valid]) ** 2
    j = int(np.argmax(ratios_sq))
    delta = 1.0 - float(ratios_sq[j])
    if delta <= 0:
        raise ValueError(f"trace is not contracting (max ratio^2 = {ratios_sq[j]:.6f})")
    nu_hat = delta / (2.0 * h)

    # the contraction certifies the secant inequality at iterates with an
    # observed outgoing step, i.e. all but the final record
    x_star = np.asarray(oracle.project(trace.iterates[0]), dtype=np.float64)
    pts = np.stack(trace.iterates[:-1])
    _, grads = _eval_batch(oracle, pts)
    diff = pts - x_star
    inner = np.einsum("ij,ij->i", grads, diff)
    rr = np.linalg.norm(diff, axis=1)
    keep = rr > 1e-8
    viol = _violations(nu_hat * rr[keep] ** 2, inner[keep])

    idx = np.nonzero(valid)[0][j]
    witness = (trace.iterates[idx].copy(), trace.iterates[idx + 1].copy())
    return witness, int(valid.sum()), nu_hat, viol, trace.k[:-1][keep]


def converse_secant(trace: SolverTrace, oracle: Objective, h: float) -> ConstantEstimate:
    """Secant constant certified by an observed gradient-descent contraction.

    From the worst squared ratio ``(r_{k+1}/r_k)^2 = 1 - delta`` the
    implied constant is ``nu = delta / (2h)``; the secant inequality with
    this nu is then verified at every iterate that has an observed outgoing
    step (the final record has none, so the contraction certifies nothing
    there). A failure indicates a corrupted trace, since the inequality
    holds by the same algebra that produces the estimate. Requires a unique
    minimizer so the projection is constant.
    """
    witness, n_ratios, nu_hat, viol, _ = _converse_data(trace, oracle, h)
    if viol.size and float(np.max(viol)) > SLACK:
        raise ArithmeticError(
            f"secant inequality violated along the trace (max violation "
            f"{float(np.max(viol)):.3e}); trace and oracle are inconsistent"
        )
    return ConstantEstimate(
        value=nu_hat,
        witness=witness,
        method="contraction_converse",
        samples_used=n_ratios,
    )


# ---------------------------------------------------------------------------
# rate fitting


def fit_rate(
    trace: SolverTrace,
    model: str,
    window: tuple[int, int],
    f_star: float | None = None,
) -> RateFit:
    """Least-squares rate fit of the objective gap over ``window`` (inclusive).

    ``model`` is "linear_geometric" (log gap vs k), or "sublinear_1_over_k" /
    "sublinear_1_over_k2" (log gap vs log k; the window must start at k >= 1).
    Nonpositive gaps shrink the window to its positive prefix; fewer than 10
    surviving points is an error. When no f_star is known anywhere, the best
    value seen in the trace is used as a surrogate.
    """
    if model not in ("linear_geometric", "sublinear_1_over_k", "sublinear_1_over_k2"):
        raise ValueError(f"unknown rate model {model!r}")
    if f_star is None:
        f_star = trace.f_star
    if f_star is None:
        f_star = float(np.min(trace.f))
    k0, k1 = int(window[0]), int(window[1])
    if not (0 <= k0 <= k1 < len(trace)):
        raise ValueError(f"window {window} outside trace of length {len(trace)}")
    if model != "linear_geometric" and k0 < 1:
        raise ValueError("log-log fits need a window starting at k >= 1")
    gap = trace.f[k0 : k1 + 1] - f_star
    truncated = False
    nonpos = np.nonzero(gap <= 0)[0]
    if nonpos.size:
        gap = gap[: nonpos[0]]
        k1 = k0 + int(nonpos[0]) - 1
        truncated = True
    if gap.size < 10:
        raise ValueError(f"only {gap.size} positive gap points in window; need >= 10")
    ks = np.arange(k0, k1 + 1, dtype=np.float64)
    y = np.log(gap)
    x = ks if model == "linear_geometric" else np.log(ks)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= _TINY:
        r_sq = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r_sq = max(0.0, 1.0 - ss_res / ss_tot)
    factor = math.exp(slope) if model == "linear_geometric" else float(slope)
    return RateFit(model, factor, r_sq, (k0, k1), truncated)


# ---------------------------------------------------------------------------
# appendix grid verification


def appendix_grid(big_r: float, nu: float, grid_steps: int) -> GridOptimum:
    """Grid-minimize the two contraction-factor cases over (theta, h).

    Case A (h in (0, theta/R]):  fa = nu^2 h^2 - 2((1-theta) nu + theta nu^2/(2R)) h + 1
    Case B (h in [theta/R, 4/R]): fb = 4 R^2 h^2 - 2(2 theta R + (1-theta) nu) h + 1

    Both attain the common minimum 1 - nu/(2R) at (theta, h) = (1/2, 1/(2R));
    case B's unbounded h-range is truncated at 4/R, past every minimizer.
    """
    if big_r <= 0:
        raise ValueError(f"R must be positive, got {big_r}")
    if not 0 < nu < 2 * big_r:
        raise ValueError(f"need 0 < nu < 2R, got nu = {nu}, R = {big_r}")
    if grid_steps < 1000:
        raise ValueError(f"grid_steps must be >= 1000, got {grid_steps}")

    n = int(grid_steps)
    thetas = np.linspace(0.0, 1.0, n + 1)
    frac_a = np.arange(1, n + 1, dtype=np.float64) / n  # (0, 1], excludes h = 0
    frac_b = np.linspace(0.0, 1.0, n + 1)

    best_a = (math.inf, 0.0, 0.0)
    best_b = (math.inf, 0.0, 0.0)
    for theta in thetas:
        if theta > 0.0:
            h = (theta / big_r) * frac_a
            fa = (nu * h) ** 2 - 2.0 * ((1.0 - theta) * nu + theta * nu**2 / (2.0 * big_r)) * h + 1.0
            i = int(np.argmin(fa))
            if fa[i] < best_a[0]:
                best_a = (float(fa[i]), float(theta), float(h[i]))
        lo = theta / big_r
        h = lo + (4.0 / big_r - lo) * frac_b
        fb = (2.0 * big_r * h) ** 2 - 2.0 * (2.0 * theta * big_r + (1.0 - theta) * nu) * h + 1.0
        i = int(np.argmin(fb))
        if fb[i] < best_b[0]:
            best_b = (float(fb[i]), float(theta), float(h[i]))

    if best_a[0] <= best_b[0]:
        min_value, theta_star, h_star = best_a
    else:
        min_value, theta_star, h_star = best_b
    return GridOptimum(
        theta_star=theta_star,
        h_star=h_star,
        min_value=min_value,
        case_a_value=best_a[0],
        case_b_value=best_b[0],
    )
