"""Maximize the secret-key-rate lower bound over source brightness, and sweep
the maximization over path length and alphabet size.

The search is a logarithmic coarse grid followed by golden-section refinement
of the best bracket.  The refined objective can never come out below the best
coarse-grid point (the best evaluation seen anywhere is returned); if the
refinement stage fails to at least match the grid, the row's ``diagnostic``
flag is raised instead of trusting unimodality silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SweepPointError
from .link import ProtocolParams, link_budget
from .rates import EveModel, eve_chi, mutual_information, skr_lower_bound
from .receiver import confusion_quadrature

#: Default brightness search interval.  The protocol regime requires
#: N_S << 1 photon/mode; 0.5 is a hard ceiling enforcing it, and an optimum
#: at the ceiling is reported via ``at_bound``.
DEFAULT_NS_BOUNDS = (1e-7, 0.5)
DEFAULT_GRID_POINTS = 25

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepRow:
    """One optimized operating point."""

    L: float
    K: int
    N_S_opt: float
    snr: float
    I_AB: float
    chi: float
    skr_lb: float
    secure: bool
    at_bound: bool
    diagnostic: bool = False


def _validate_search(bounds: tuple[float, float], tol: float, grid_points: int) -> None:
    n_min, n_max = bounds
    if not (0 < n_min < n_max):
        raise DomainError(f"need 0 < N_min < N_max, got {bounds}")
    if not 0 < tol <= 0.1:
        raise DomainError(f"tol must lie in (0, 0.1], got {tol}")
    if grid_points < 3:
        raise DomainError(f"grid_points must be >= 3, got {grid_points}")


@dataclass(frozen=True)
class _Eval:
    N_S: float
    objective: float  # unclamped beta*I_AB - chi
    snr: float
    I_AB: float
    chi: float


def _evaluate(p: ProtocolParams, eve: EveModel, N_S: float, f_E: float, quad_tol: float) -> _Eval:
    pt = replace(p, N_S=float(N_S))
    ch = link_budget(pt)
    cm = confusion_quadrature(ch, pt.K, tol=quad_tol)
    i_ab = mutual_information(cm, pt.R)
    chi = eve_chi(eve, pt, f_E)
    return _Eval(N_S=N_S, objective=pt.beta * i_ab - chi, snr=ch.snr, I_AB=i_ab, chi=chi)


def optimize_brightness(
    p: ProtocolParams,
    eve: EveModel,
    bounds: tuple[float, float] = DEFAULT_NS_BOUNDS,
    tol: float = 1e-3,
    f_E: float = 0.0,
    grid_points: int = DEFAULT_GRID_POINTS,
    quad_tol: float = 1e-10,
) -> SweepRow:
    """Maximize the key-rate bound over N_S within ``bounds``.

    ``tol`` is the relative width at which golden-section refinement stops;
    it must lie in (0, 0.1].  The optimization is fully deterministic (the
    pipeline uses quadrature, never sampling).
    """
    _validate_search(bounds, tol, grid_points)
    n_min, n_max = bounds

    def evaluate(ns: float) -> _Eval:
        return _evaluate(p, eve, ns, f_E, quad_tol)

    grid = np.geomspace(n_min, n_max, grid_points)
    evals = [evaluate(ns) for ns in grid]
    objs = [e.objective for e in evals]
    i_best = int(np.argmax(objs))
    best = evals[i_best]
    grid_best_obj = best.objective

    # Golden-section refinement on the bracket around the best grid point,
    # in log-brightness coordinates.
    lo = math.log(grid[max(i_best - 1, 0)])
    hi = math.log(grid[min(i_best + 1, grid_points - 1)])
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    ec, ed = evaluate(math.exp(c)), evaluate(math.exp(d))
    refined = max(ec, ed, key=lambda e: e.objective)
    while math.exp(hi) - math.exp(lo) > tol * math.exp(0.5 * (lo + hi)):
        if ec.objective >= ed.objective:
            hi, d, ed = d, c, ec
            c = hi - _INVPHI * (hi - lo)
            ec = evaluate(math.exp(c))
            candidate = ec
        else:
            lo, c, ec = c, d, ed
            d = lo + _INVPHI * (hi - lo)
            ed = evaluate(math.exp(d))
            candidate = ed
        if candidate.objective > refined.objective:
            refined = candidate

    # Unimodality alarm: with an interior bracket, refinement should at least
    # match the grid maximum (up to the O(tol^2) plateau around the peak).
    # A bigger shortfall means the bracket was not unimodal.
    interior = 0 < i_best < grid_points - 1
    slack = abs(grid_best_obj) * tol ** 2 + 1e-300
    diagnostic = interior and refined.objective < grid_best_obj - slack
    if refined.objective > best.objective:
        best = refined

    step = (n_max / n_min) ** (1.0 / (grid_points - 1))
    at_bound = best.N_S * step >= n_max or best.N_S <= n_min * step

    rate = skr_lower_bound(best.I_AB, p.beta, best.chi)
    return SweepRow(
        L=p.L, K=p.K, N_S_opt=best.N_S, snr=best.snr,
        I_AB=rate.I_AB, chi=rate.chi, skr_lb=rate.skr_lb, secure=rate.secure,
        at_bound=at_bound, diagnostic=diagnostic,
    )


def sweep(
    p: ProtocolParams,
    eve: EveModel,
    Ls: list[float],
    Ks: list[int],
    bounds: tuple[float, float] = DEFAULT_NS_BOUNDS,
    tol: float = 1e-3,
    f_E: float = 0.0,
    grid_points: int = DEFAULT_GRID_POINTS,
    quad_tol: float = 1e-10,
) -> list[SweepRow]:
    """Optimize every (L, K) pair; rows come back ordered by (K, L)."""
    if not Ls or not Ks:
        raise DomainError("Ls and Ks must be nonempty")
    _validate_search(bounds, tol, grid_points)
    rows = []
    for K in sorted(Ks):
        for L in sorted(Ls):
            pt = replace(p, K=K, L=L)
            try:
                rows.append(
                    optimize_brightness(pt, eve, bounds=bounds, tol=tol, f_E=f_E,
                                        grid_points=grid_points, quad_tol=quad_tol)
                )
            except Exception as exc:
                raise SweepPointError(L, K, exc) from exc
    return rows
