"""Shannon-information rate, the secret-key-rate lower bound, and the
pluggable eavesdropper-information models.

The eavesdropper's Holevo-information rate is consumed as an opaque quantity:
either identically zero (``ZeroLeakage``) or multilinearly interpolated from a
user-supplied grid over (path length, source brightness, intrusion parameter)
(``TabulatedBound``).  Computing that bound is out of scope here.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError, GridRangeError
from .link import ProtocolParams
from .receiver import ConfusionMatrix

#: Row-sum slack accepted by the information-rate formula (looser than the
#: matrix type's own invariant so near-miss inputs fail loudly, not silently).
STOCHASTIC_TOL = 1e-6


def mutual_information(cm: ConfusionMatrix, R: float) -> float:
    """Shannon-information rate in bits/s for uniform input symbols.

    Evaluates R * sum_k sum_k~ [P(k~|k)/K] * log2[K * P(k~|k) / sum_k' P(k~|k')]
    with 0*log(.) terms defined as 0.
    """
    if R <= 0:
        raise DomainError(f"symbol rate must be positive, got {R}")
    p = np.asarray(cm.p, dtype=float)
    defect = np.max(np.abs(p.sum(axis=1) - 1.0))
    if defect > STOCHASTIC_TOL:
        raise DomainError(f"matrix is not row-stochastic (defect {defect:.3e})")
    col = p.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = cm.K * p / col[None, :]
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, ratio, 1.0)), 0.0)
    return R * float(terms.sum()) / cm.K


def mutual_information_circulant(q: np.ndarray, R: float) -> float:
    """Information rate R * (log2 K - H(q)) for a circulant channel.

    q is the error distribution over symbol offsets; equals
    ``mutual_information`` on the matrix built from q.
    """
    if R <= 0:
        raise DomainError(f"symbol rate must be positive, got {R}")
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size < 2:
        raise DomainError("q must be a probability vector of length K >= 2")
    if np.any(q < 0):
        raise DomainError("q must be nonnegative")
    if abs(float(q.sum()) - 1.0) > 1e-9:
        raise DomainError(f"q must sum to 1 within 1e-9, got {float(q.sum())!r}")
    nz = q[q > 0]
    entropy = -float((nz * np.log2(nz)).sum())
    return R * (math.log2(q.size) - entropy)


@dataclass(frozen=True)
class RateResult:
    """Rates of one operating point, all in bits/s."""

    I_AB: float
    chi: float
    skr_lb: float
    secure: bool


def skr_lower_bound(I_AB: float, beta: float, chi: float) -> RateResult:
    """Secret-key-rate lower bound beta*I_AB - chi, clamped at zero.

    A negative bound means "abort the protocol"; the ``secure`` flag keeps
    that information when the clamp fires.
    """
    if I_AB < 0:
        raise DomainError(f"I_AB must be >= 0, got {I_AB}")
    if not 0 < beta <= 1:
        raise DomainError(f"beta must be in (0, 1], got {beta}")
    if chi < 0:
        raise DomainError(f"chi must be >= 0, got {chi}")
    margin = beta * I_AB - chi
    return RateResult(I_AB=I_AB, chi=chi, skr_lb=max(0.0, margin), secure=margin > 0)


class EveModel(ABC):
    """Evaluator for the eavesdropper's Holevo-information rate (bits/s).

    Implementations must be immutable after construction; they are shared
    freely across parallel evaluations.
    """

    @abstractmethod
    def chi_rate(self, p: ProtocolParams, f_E: float) -> float:
        ...


class ZeroLeakage(EveModel):
    """No eavesdropper information; chi = 0 always."""

    def chi_rate(self, p: ProtocolParams, f_E: float) -> float:
        return 0.0


class TabulatedBound(EveModel):
    """Multilinear interpolation of chi over a grid in (L, N_S, f_E).

    Queries outside the grid hull raise GridRangeError; no extrapolation.
    """

    def __init__(self, L_km: np.ndarray, N_S: np.ndarray, f_E: np.ndarray, chi_bits_per_s: np.ndarray):
        axes = []
        for name, ax in (("L_km", L_km), ("N_S", N_S), ("f_E", f_E)):
            ax = np.asarray(ax, dtype=float)
            if ax.ndim != 1 or ax.size < 1:
                raise DomainError(f"axis {name} must be a nonempty 1-D list")
            if ax.size > 1 and np.any(np.diff(ax) <= 0):
                raise DomainError(f"axis {name} must be strictly ascending")
            axes.append(ax)
        values = np.asarray(chi_bits_per_s, dtype=float)
        expected = axes[0].size * axes[1].size * axes[2].size
        if values.size != expected:
            raise DomainError(
                f"chi_bits_per_s has {values.size} entries, grid needs {expected}"
            )
        values = values.reshape(axes[0].size, axes[1].size, axes[2].size)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("chi values must be finite and >= 0")
        self._axes = tuple(axes)
        self._interp = RegularGridInterpolator(
            tuple(axes), values, method="linear", bounds_error=True
        )

    @classmethod
    def from_json(cls, path: str) -> "TabulatedBound":
        """Load a grid file: {"axes": {"L_km": [...], "N_S": [...], "f_E": [...]},
        "chi_bits_per_s": [...]} with the value array flattened row-major."""
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        try:
            axes = doc["axes"]
            return cls(axes["L_km"], axes["N_S"], axes["f_E"], doc["chi_bits_per_s"])
        except KeyError as exc:
            raise DomainError(f"grid file {path!r} is missing key {exc}") from exc

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._axes

    def chi_rate(self, p: ProtocolParams, f_E: float) -> float:
        if p.N_S is None:
            raise DomainError("TabulatedBound requires N_S to be set")
        try:
            return float(self._interp([p.L, p.N_S, f_E])[0])
        except ValueError as exc:
            raise GridRangeError(
                f"query (L={p.L}, N_S={p.N_S}, f_E={f_E}) is outside the chi grid"
            ) from exc


def eve_chi(model: EveModel, p: ProtocolParams, f_E: float) -> float:
    """Holevo-information rate of the given model at (p, f_E)."""
    if not 0 <= f_E <= 1:
        raise DomainError(f"f_E must lie in [0, 1], got {f_E}")
    chi = model.chi_rate(p, f_E)
    if chi < 0:
        raise DomainError(f"eve model returned negative chi {chi}")
    return chi
