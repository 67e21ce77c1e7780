"""Per-link best-response solver.

Outer loop: ratio (Dinkelbach-style) iteration on q = rate / total power.
Inner loop: Lagrangian dual ascent whose primal step is the closed-form
water-filling; a deterministic active-set solve backs it up when the
subgradient iteration stops short of the requested tolerance, so returned
best responses are exact up to floating point.

Interference from all other links is frozen for the whole solve
(best-response semantics).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .link_model import (PowerAllocation, interference_cellular,
                         interference_d2d, log2_1p)
from .topology import Topology

LOG2E = 1.0 / math.log(2.0)

# The cellular water level carries (1 + CELL_QOS_MULT_SIGN * delta) for the
# rate-floor multiplier delta, i.e. the multiplier *lowers* the level. The
# D2D counterpart uses (1 + alpha). Kept as a named constant so the sign
# convention is auditable in one place.
CELL_QOS_MULT_SIGN = -1.0

# primal-change threshold used alongside the dual residuals; multiplier
# oscillation can stall the complementary-slackness test on its own
PRIMAL_CHANGE_TOL = 1e-7


@dataclass
class BestResponse:
    """Outcome of one link's best-response solve."""

    powers: np.ndarray | float
    q_star: float
    feasible: bool
    converged: bool
    trace: list = field(default_factory=list)  # q per outer iteration, ending at q_star
    residual: float = 0.0                      # r - q * p_total at the accepted iterate


def water_fill_d2d(q: float, alpha: float, beta: float,
                   interference_plus_noise: np.ndarray, g_direct: np.ndarray,
                   eta: float) -> np.ndarray:
    """Closed-form primal step: [level - I_k/g_k]^+ per channel.

    The common water level is eta*(1+alpha)*log2(e) / (q + eta*beta);
    interference lowers the effective level channel by channel. With
    q + eta*beta == 0 the level is unbounded and an all-inf vector is
    returned for the caller to clamp against the power budget.
    """
    denom = q + eta * beta
    if denom <= 0.0:
        return np.full_like(g_direct, np.inf)
    level = eta * (1.0 + alpha) * LOG2E / denom
    return np.maximum(0.0, level - interference_plus_noise / g_direct)


def water_fill_cellular(q: float, delta: float, theta: float,
                        interference_plus_noise: float, g_cell: float,
                        eta: float) -> float:
    """Scalar water-filling for a cellular UE; see CELL_QOS_MULT_SIGN."""
    weight = 1.0 + CELL_QOS_MULT_SIGN * delta
    if weight <= 0.0:
        return 0.0
    denom = q + eta * theta
    if denom <= 0.0:
        return math.inf
    return max(0.0, eta * weight * LOG2E / denom - interference_plus_noise / g_cell)


def _rate_channels(p: np.ndarray, a: np.ndarray) -> float:
    """Sum-rate of parallel channels with normalized interference a = I/g."""
    return float(np.sum(log2_1p(p / a)))


def waterfill_level_for_total(a: np.ndarray, total: float) -> float:
    """Water level v such that sum_k [v - a_k]^+ equals `total` (> 0)."""
    a_sorted = np.sort(a)
    csum = np.cumsum(a_sorted)
    for m in range(1, a_sorted.size + 1):
        v = (total + csum[m - 1]) / m
        if m == a_sorted.size or v <= a_sorted[m]:
            return v
    raise AssertionError("unreachable")


def rate_waterfill(interference_plus_noise: np.ndarray, g: np.ndarray,
                   total: float) -> np.ndarray:
    """Rate-maximizing split of `total` watts across parallel channels."""
    a = interference_plus_noise / g
    v = waterfill_level_for_total(a, total)
    return np.maximum(0.0, v - a)


def _exact_best_power_d2d(q: float, ipn: np.ndarray, g: np.ndarray, eta: float,
                          p_max: float, r_min: float):
    """Active-set maximizer of r(p) - q * p_total under rate floor and budget.

    Returns (p, alpha, beta, feasible). On an unattainable rate floor the
    rate constraint is dropped (outage): the returned p is the alpha = 0
    optimum and feasible is False.
    """
    a = ipn / g
    p_unc = None
    if q > 0.0:
        level_unc = eta * LOG2E / q
        p_unc = np.maximum(0.0, level_unc - a)
    if p_unc is not None and p_unc.sum() <= p_max:
        if _rate_channels(p_unc, a) >= r_min:
            return p_unc, 0.0, 0.0, True
        # rate floor active: raise the common level until the floor is met
        # or the budget binds
        level_budget = waterfill_level_for_total(a, p_max)
        p_budget = np.maximum(0.0, level_budget - a)
        if _rate_channels(p_budget, a) < r_min:
            return p_unc, 0.0, 0.0, False
        lo, hi = level_unc, level_budget
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _rate_channels(np.maximum(0.0, mid - a), a) >= r_min:
                hi = mid
            else:
                lo = mid
        level = hi
        p = np.maximum(0.0, level - a)
        alpha = max(0.0, level * q / (eta * LOG2E) - 1.0)
        return p, alpha, 0.0, True
    # budget active: the objective reduces to rate maximization at total p_max
    level = waterfill_level_for_total(a, p_max)
    p = np.maximum(0.0, level - a)
    beta = max(0.0, (eta * LOG2E / level - q) / eta)
    feasible = _rate_channels(p, a) >= r_min
    return p, 0.0, beta, feasible


def _exact_best_power_cellular(q: float, ipn: float, g: float, eta: float,
                               p_max: float, r_min: float):
    """Scalar counterpart of _exact_best_power_d2d; returns (p, delta, theta, feasible).

    The printed (1 - delta) level cannot encode an active rate floor with a
    nonnegative multiplier, so in that branch the rate-floor power is
    returned directly with delta = 0.
    """
    a = ipn / g
    p_qos = (2.0**r_min - 1.0) * a
    p_unc = math.inf if q <= 0.0 else max(0.0, eta * LOG2E / q - a)
    if p_unc <= p_max:
        if p_unc >= p_qos:
            return p_unc, 0.0, 0.0, True
        if p_qos <= p_max:
            return p_qos, 0.0, 0.0, True
        return p_unc, 0.0, 0.0, False
    theta = max(0.0, (eta * LOG2E / (p_max + a) - q) / eta)
    return p_max, 0.0, theta, p_max >= p_qos


def dual_ascent_d2d(i: int, q: float, alloc_others: PowerAllocation,
                    topo: Topology, cfg: ScenarioConfig):
    """Solve the transformed problem at fixed q for D2D pair i.

    Projected-subgradient updates on the two multipliers with diminishing
    steps mu(tau) = step_c / sqrt(tau); falls back to the exact active-set
    solve if the tolerance is not certified within the iteration cap.
    Returns (power vector, alpha, beta, feasible).
    """
    sc = cfg.solver
    eta, p_max, r_min = cfg.pa_efficiency, cfg.p_d2d_max, cfg.qos_d2d
    others = alloc_others.copy()
    others.p_d2d[i, :] = 0.0
    ipn = interference_d2d(i, others, topo, cfg.noise_power)
    g = topo.g_direct[i]
    a = ipn / g

    if q <= 0.0:
        # unbounded water level: the budget constraint must bind, and the
        # subgradient on beta vanishes at the clamped primal, so resolve the
        # active set directly
        return _exact_best_power_d2d(q, ipn, g, eta, p_max, r_min)

    alpha = beta = 0.0
    p_prev = None
    for tau in range(1, sc.dual_max_iters + 1):
        p = water_fill_d2d(q, alpha, beta, ipn, g, eta)
        r = _rate_channels(p, a)
        s = float(p.sum())
        qos_viol = max(0.0, r_min - r)
        bud_viol = max(0.0, s - p_max)
        cs_alpha = alpha * abs(r - r_min)
        cs_beta = beta * abs(p_max - s)
        change = math.inf if p_prev is None else float(np.max(np.abs(p - p_prev)))
        if (qos_viol < sc.dual_tol and bud_viol < sc.dual_tol
                and cs_alpha <= sc.dual_tol * max(1.0, alpha)
                and cs_beta <= sc.dual_tol * max(1.0, beta)
                and change < PRIMAL_CHANGE_TOL):
            return p, alpha, beta, True
        mu = sc.step_c / math.sqrt(tau)
        alpha = max(0.0, alpha - mu * (r - r_min))
        beta = max(0.0, beta + mu * (s - p_max))
        p_prev = p
    return _exact_best_power_d2d(q, ipn, g, eta, p_max, r_min)


def dual_ascent_cellular(k: int, q: float, alloc_others: PowerAllocation,
                         topo: Topology, cfg: ScenarioConfig):
    """Cellular counterpart of dual_ascent_d2d; returns (p, delta, theta, feasible)."""
    sc = cfg.solver
    eta, p_max, r_min = cfg.pa_efficiency, cfg.p_cell_max, cfg.qos_cell
    ipn = interference_cellular(k, alloc_others, topo, cfg.noise_power)
    g = float(topo.g_cell2bs[k])
    a = ipn / g

    if q <= 0.0:
        return _exact_best_power_cellular(q, ipn, g, eta, p_max, r_min)

    delta = theta = 0.0
    p_prev = None
    for tau in range(1, sc.dual_max_iters + 1):
        p = water_fill_cellular(q, delta, theta, ipn, g, eta)
        if not math.isfinite(p):
            p = p_max
        r = float(log2_1p(p / a))
        qos_viol = max(0.0, r_min - r)
        bud_viol = max(0.0, p - p_max)
        cs_delta = delta * abs(r - r_min)
        cs_theta = theta * abs(p_max - p)
        change = math.inf if p_prev is None else abs(p - p_prev)
        if (qos_viol < sc.dual_tol and bud_viol < sc.dual_tol
                and cs_delta <= sc.dual_tol * max(1.0, delta)
                and cs_theta <= sc.dual_tol * max(1.0, theta)
                and change < PRIMAL_CHANGE_TOL):
            return p, delta, theta, True
        mu = sc.step_c / math.sqrt(tau)
        delta = max(0.0, delta - mu * (r - r_min))
        theta = max(0.0, theta + mu * (p - p_max))
        p_prev = p
    return _exact_best_power_cellular(q, ipn, g, eta, p_max, r_min)


def dinkelbach_best_response_d2d(i: int, alloc_others: PowerAllocation,
                                 topo: Topology,
                                 cfg: ScenarioConfig) -> BestResponse:
    """Best-response power vector of D2D pair i against frozen interference."""
    sc = cfg.solver
    eta, p_cir = cfg.pa_efficiency, cfg.p_cir
    others = alloc_others.copy()
    others.p_d2d[i, :] = 0.0
    ipn = interference_d2d(i, others, topo, cfg.noise_power)
    a = ipn / topo.g_direct[i]

    q = 0.0
    qs = []
    p = p_prev = None
    feasible = True
    residual = math.inf
    for _ in range(sc.l_max):
        p, _alpha, _beta, feasible = dual_ascent_d2d(i, q, alloc_others, topo, cfg)
        r = _rate_channels(p, a)
        ptot = float(p.sum()) / eta + 2.0 * p_cir
        # identical primal as last round means the parametric objective is
        # exactly zero by construction; avoid the rounding of r - q*ptot
        residual = 0.0 if (p_prev is not None and np.array_equal(p, p_prev)) \
            else r - q * ptot
        qs.append(q)
        q_new = r / ptot
        if residual <= sc.delta:
            return BestResponse(p, q_new, feasible, True, qs + [q_new], residual)
        q = q_new
        p_prev = p
    return BestResponse(p, q, feasible, False, qs, residual)


def dinkelbach_best_response_cellular(k: int, alloc_others: PowerAllocation,
                                      topo: Topology,
                                      cfg: ScenarioConfig) -> BestResponse:
    """Best-response transmit power of cellular UE k against frozen interference."""
    sc = cfg.solver
    eta, p_cir = cfg.pa_efficiency, cfg.p_cir
    ipn = interference_cellular(k, alloc_others, topo, cfg.noise_power)
    a = ipn / float(topo.g_cell2bs[k])

    q = 0.0
    qs = []
    p = p_prev = None
    feasible = True
    residual = math.inf
    for _ in range(sc.l_max):
        p, _delta, _theta, feasible = dual_ascent_cellular(k, q, alloc_others,
                                                           topo, cfg)
        r = float(log2_1p(p / a))
        ptot = p / eta + p_cir
        residual = 0.0 if (p_prev is not None and p == p_prev) else r - q * ptot
        qs.append(q)
        q_new = r / ptot
        if residual <= sc.delta:
            return BestResponse(p, q_new, feasible, True, qs + [q_new], residual)
        q = q_new
        p_prev = p
    return BestResponse(p, q, feasible, False, qs, residual)
