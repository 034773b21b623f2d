"""Confusion matrix of the dual-homodyne receiver.

Two independent routes compute Pr(decoded k~ | sent k):

* ``confusion_quadrature`` integrates the exact phase density of the received
  point over each decision wedge.  For an isotropic Gaussian centered at
  distance d = r/sigma from the origin, integrating out the radius gives the
  closed-form angular marginal

      f(phi) = exp(-d^2/2)/(2*pi)
             + d*cos(phi)/sqrt(2*pi) * exp(-(d*sin(phi))^2/2) * Phi(d*cos(phi))

  which is integrated by adaptive Gauss-Legendre subdivision (10/21-point
  pair, vectorized over intervals).  The row for sent symbol 0 fills the
  whole matrix by circulant symmetry.

* ``confusion_monte_carlo`` samples receiver outputs per sent symbol, decodes
  them with the wedge rule, and reports empirical frequencies with binomial
  standard errors.

Sampling uses the Philox/polar-method streams from ``streams``; see that
module for the reproducibility contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import ndtr

from .constellation import TWO_PI, Constellation, IQPoint, _TIE_ULPS
from .errors import DomainError, QuadratureError
from .link import GaussianChannel
from .streams import normal_pairs, philox_stream

_GL_LO_X, _GL_LO_W = leggauss(10)
_GL_HI_X, _GL_HI_W = leggauss(21)
_MAX_DEPTH = 64
# Beyond ~38 noise widths from the mean direction the integrand underflows;
# seeding breakpoints at +-48/d keeps the peak visible to the quadrature nodes.
_PEAK_HALFWIDTH = 48.0

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-stochastic K x K table, p[k, k~] = Pr(decoded k~ | sent k)."""

    K: int
    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.shape != (self.K, self.K):
            raise DomainError(f"expected shape ({self.K}, {self.K}), got {arr.shape}")
        if np.any(arr < 0) or np.any(arr > 1):
            raise DomainError("confusion-matrix entries must lie in [0, 1]")
        defect = np.max(np.abs(arr.sum(axis=1) - 1.0))
        if defect > ROW_SUM_TOL:
            raise DomainError(f"rows must sum to 1 within {ROW_SUM_TOL:g}, defect {defect:.3e}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @classmethod
    def from_circulant(cls, q: np.ndarray) -> "ConfusionMatrix":
        """Expand an error distribution over offsets into the full matrix."""
        q = np.asarray(q, dtype=float)
        K = q.size
        idx = (np.arange(K)[None, :] - np.arange(K)[:, None]) % K
        return cls(K=K, p=q[idx])


def bpsk_error_closed_form(snr: float) -> float:
    """Binary PSK symbol-error probability: the Gaussian tail above sqrt(snr)."""
    if snr < 0:
        raise DomainError(f"snr must be >= 0, got {snr}")
    return float(ndtr(-math.sqrt(snr)))


def _phase_density(phi: np.ndarray, d: float) -> np.ndarray:
    """Density of the received phase for mean distance d, evaluated at phi."""
    with np.errstate(under="ignore"):
        a = d * np.cos(phi)
        return (
            np.exp(-0.5 * d * d) / TWO_PI
            + a / math.sqrt(TWO_PI) * np.exp(-0.5 * (d * np.sin(phi)) ** 2) * ndtr(a)
        )


def _wedge_probabilities(d: float, K: int, tol: float) -> np.ndarray:
    """Integrate the phase density over each of the K decision wedges.

    Intervals are subdivided until each local 10- vs 21-point Gauss-Legendre
    discrepancy is within its share of the budget; the row-sum defect is then
    verified against tol.
    """
    half_w = math.pi / K
    # Wedge 0 contains the density peak at phi = 0.  Seed breakpoints around
    # it so a narrow peak (width ~1/d) is never invisible to the nodes.
    brk = [-half_w]
    if d > 0 and _PEAK_HALFWIDTH / d < half_w:
        brk += [-_PEAK_HALFWIDTH / d, 0.0, _PEAK_HALFWIDTH / d]
    else:
        brk.append(0.0)
    brk.append(half_w)

    a = list(brk[:-1])
    b = list(brk[1:])
    owner = [0] * (len(brk) - 1)
    for j in range(1, K):
        c = TWO_PI * j / K
        a.append(c - half_w)
        b.append(c + half_w)
        owner.append(j)
    a = np.array(a)
    b = np.array(b)
    owner = np.array(owner)

    eps_per_len = (tol / (4.0 * K)) / (2.0 * half_w)
    total = np.zeros(K)
    worst = 0.0
    for depth in range(_MAX_DEPTH + 1):
        if a.size == 0:
            break
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        f_lo = _phase_density(mid[:, None] + half[:, None] * _GL_LO_X[None, :], d)
        f_hi = _phase_density(mid[:, None] + half[:, None] * _GL_HI_X[None, :], d)
        i_lo = (f_lo @ _GL_LO_W) * half
        i_hi = (f_hi @ _GL_HI_W) * half
        err = np.abs(i_hi - i_lo)
        ok = err <= eps_per_len * (b - a)
        if depth == _MAX_DEPTH:
            # Out of depth: bank the best available estimates and report.
            np.add.at(total, owner, i_hi)
            worst = float(err[~ok].sum())
            break
        np.add.at(total, owner[ok], i_hi[ok])
        bad = ~ok
        a, b, owner = (
            np.concatenate([a[bad], mid[bad]]),
            np.concatenate([mid[bad], b[bad]]),
            np.concatenate([owner[bad], owner[bad]]),
        )
    defect = abs(float(total.sum()) - 1.0)
    if defect > tol or worst > tol:
        raise QuadratureError("wedge quadrature did not converge", max(defect, worst))
    return total


def confusion_quadrature(ch: GaussianChannel, K: int, tol: float = 1e-10) -> ConfusionMatrix:
    """Deterministic confusion matrix via wedge integration.

    tol bounds the row-sum defect; it must lie in (0, 1e-3].
    """
    if K < 2:
        raise DomainError(f"K must be >= 2, got {K}")
    if not 0 < tol <= 1e-3:
        raise DomainError(f"tol must lie in (0, 1e-3], got {tol}")
    d = ch.r / ch.sigma
    q = _wedge_probabilities(d, K, tol)
    # Clip float residue so the row passes the [0, 1] entry check exactly.
    q = np.clip(q, 0.0, 1.0)
    return ConfusionMatrix.from_circulant(q)


def sample_iq(
    ch: GaussianChannel,
    c: Constellation,
    k: int,
    rng: np.random.Generator,
    noiseless: bool = False,
) -> IQPoint:
    """Draw one receiver output for sent symbol k.

    ``noiseless`` suppresses the Gaussian noise entirely (the sigma -> 0
    limit) and consumes nothing from the stream.
    """
    if not 0 <= k < c.K:
        raise DomainError(f"symbol index {k} out of range for K={c.K}")
    mean_i = ch.r * math.cos(c.angles[k])
    mean_q = ch.r * math.sin(c.angles[k])
    if noiseless:
        return IQPoint(mean_i, mean_q)
    n_i, n_q = normal_pairs(rng, 1)
    return IQPoint(mean_i + ch.sigma * n_i[0], mean_q + ch.sigma * n_q[0])


def _decide_batch(i_arr: np.ndarray, q_arr: np.ndarray, K: int) -> np.ndarray:
    """Vectorized wedge decision; same rule as constellation.decide."""
    phi = np.arctan2(q_arr, i_arr)
    x = phi * (K / TWO_PI)
    lo = np.floor(x)
    frac = x - lo
    k = (lo + (frac > 0.5)).astype(np.int64) % K
    # Ties and origin hits are measure-zero; fix up just those entries.
    tie = np.abs(frac - 0.5) <= _TIE_ULPS * np.maximum(1.0, np.abs(x))
    if np.any(tie):
        lo_t = lo[tie].astype(np.int64)
        k[tie] = np.minimum(lo_t % K, (lo_t + 1) % K)
    origin = (i_arr == 0.0) & (q_arr == 0.0)
    if np.any(origin):
        k[origin] = 0
    return k


def confusion_monte_carlo(
    ch: GaussianChannel,
    K: int,
    n_samples: int,
    seed: int,
    n_shards: int = 1,
) -> tuple[ConfusionMatrix, np.ndarray]:
    """Empirical confusion matrix plus per-entry binomial standard errors.

    For each sent symbol, n_samples receiver outputs are drawn and decoded.
    Samples are split over n_shards substreams keyed by (seed, symbol, shard)
    and merged in shard order, so the result depends only on those inputs and
    not on execution scheduling.  Standard errors are sqrt(p(1-p)/n) floored
    at 1/n so intervals never collapse to zero width.
    """
    if K < 2:
        raise DomainError(f"K must be >= 2, got {K}")
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    if n_shards < 1:
        raise DomainError(f"n_shards must be >= 1, got {n_shards}")
    counts = np.zeros((K, K), dtype=np.int64)
    base = n_samples // n_shards
    remainder = n_samples % n_shards
    for k in range(K):
        mean_i = ch.r * math.cos(TWO_PI * k / K)
        mean_q = ch.r * math.sin(TWO_PI * k / K)
        for shard in range(n_shards):
            m = base + (1 if shard < remainder else 0)
            if m == 0:
                continue
            gen = philox_stream(seed, spawn_key=(k, shard))
            n_i, n_q = normal_pairs(gen, m)
            dec = _decide_batch(mean_i + ch.sigma * n_i, mean_q + ch.sigma * n_q, K)
            counts[k] += np.bincount(dec, minlength=K)
    p_hat = counts / float(n_samples)
    se = np.maximum(np.sqrt(p_hat * (1.0 - p_hat) / n_samples), 1.0 / n_samples)
    return ConfusionMatrix(K=K, p=p_hat), se
