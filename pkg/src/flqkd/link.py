"""Protocol parameters and the link budget mapping them to a Gaussian channel.

The measurement channel seen by the decoder is summarized by two numbers: the
conditional mean radius r of the (I, Q) pair and the per-quadrature standard
deviation sigma.  The mapping used here is a documented heuristic, not a
first-principles receiver calculation:

    r^2     = eta * M * kappa_S^2 * G_B * (1 - kappa_A) * (1 - kappa_B) * N_S
    sigma^2 = (1 + eta * kappa_S * N_B) / 2,  N_B = G_B - 1

i.e. coherent gain proportional to the mode count and the round-trip
transmissivity, with vacuum noise (1/2 per quadrature) plus the returned
amplifier spontaneous emission.  Local-oscillator excess noise is neglected
(N_LO >> 1) and broadband-source excess noise is neglected (N_S << 1).  All
downstream computation consumes only (r, sigma), so this heuristic can be
replaced, or bypassed entirely with a direct SNR override, without touching
any other module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DomainError

#: Number of modes per symbol below which the Gaussian receiver statistics
#: (a many-mode central-limit argument) become questionable.
LOW_M_THRESHOLD = 10.0

#: Baseline parameter values: 2-THz source bandwidth, 10-Gbaud symbol rate,
#: 10^6 amplifier gain, 10^4 local-oscillator brightness, 1% monitor taps,
#: 99:1 ASE-to-SPDC ratio, 0.2 dB/km fiber, 0.9 homodyne efficiency, 0.94
#: reconciliation efficiency.  Source brightness N_S has no default: it is
#: the optimization variable.  K = 2 and L = 50 km are this package's
#: baseline operating point.
DEFAULT_PARAMS: dict[str, float] = {
    "W_hz": 2e12,
    "R_baud": 1e10,
    "K": 2,
    "G_B": 1e6,
    "N_LO": 1e4,
    "kappa_A": 0.01,
    "kappa_B": 0.01,
    "n": 99.0,
    "alpha_db_per_km": 0.2,
    "L_km": 50.0,
    "eta": 0.9,
    "beta": 0.94,
}

_JSON_TO_FIELD = {
    "W_hz": "W",
    "R_baud": "R",
    "K": "K",
    "N_S": "N_S",
    "G_B": "G_B",
    "N_LO": "N_LO",
    "kappa_A": "kappa_A",
    "kappa_B": "kappa_B",
    "n": "n",
    "alpha_db_per_km": "alpha",
    "L_km": "L",
    "eta": "eta",
    "beta": "beta",
}


def path_transmissivity(L: float, alpha: float) -> float:
    """Fiber power transmissivity 10^(-alpha*L/10) for L km at alpha dB/km."""
    if L < 0 or alpha < 0:
        raise DomainError(f"path length and loss must be nonnegative, got L={L}, alpha={alpha}")
    return 10.0 ** (-alpha * L / 10.0)


class ModesPerSymbol(NamedTuple):
    modes: float
    low_m_warning: bool


def modes_per_symbol(W: float, R: float) -> ModesPerSymbol:
    """Optical modes per symbol interval, M = W/R.

    Sets ``low_m_warning`` when M < 10, where the Gaussian approximation for
    the receiver statistics starts to lose its many-mode justification.
    """
    if W <= 0 or R <= 0:
        raise DomainError(f"bandwidth and symbol rate must be positive, got W={W}, R={R}")
    m = W / R
    return ModesPerSymbol(m, m < LOW_M_THRESHOLD)


@dataclass(frozen=True)
class ProtocolParams:
    """Physical and protocol constants of one operating point.

    N_S is optional because it is the quantity the optimizer searches over;
    operations that need it raise DomainError when it is absent.
    """

    W: float = DEFAULT_PARAMS["W_hz"]
    R: float = DEFAULT_PARAMS["R_baud"]
    K: int = int(DEFAULT_PARAMS["K"])
    N_S: float | None = None
    G_B: float = DEFAULT_PARAMS["G_B"]
    N_LO: float = DEFAULT_PARAMS["N_LO"]
    kappa_A: float = DEFAULT_PARAMS["kappa_A"]
    kappa_B: float = DEFAULT_PARAMS["kappa_B"]
    n: float = DEFAULT_PARAMS["n"]
    alpha: float = DEFAULT_PARAMS["alpha_db_per_km"]
    L: float = DEFAULT_PARAMS["L_km"]
    eta: float = DEFAULT_PARAMS["eta"]
    beta: float = DEFAULT_PARAMS["beta"]

    def __post_init__(self):
        checks = [
            (self.W > 0, f"W must be > 0, got {self.W}"),
            (self.R > 0, f"R must be > 0, got {self.R}"),
            (self.K >= 2, f"K must be >= 2, got {self.K}"),
            (self.N_S is None or self.N_S >= 0, f"N_S must be >= 0, got {self.N_S}"),
            (self.G_B >= 1, f"G_B must be >= 1, got {self.G_B}"),
            (self.N_LO > 0, f"N_LO must be > 0, got {self.N_LO}"),
            (0 <= self.kappa_A < 1, f"kappa_A must be in [0, 1), got {self.kappa_A}"),
            (0 <= self.kappa_B < 1, f"kappa_B must be in [0, 1), got {self.kappa_B}"),
            (self.n >= 0, f"n must be >= 0, got {self.n}"),
            (self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}"),
            (self.L >= 0, f"L must be >= 0, got {self.L}"),
            (0 < self.eta <= 1, f"eta must be in (0, 1], got {self.eta}"),
            (0 < self.beta <= 1, f"beta must be in (0, 1], got {self.beta}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise DomainError(msg)

    # Derived quantities are computed, never stored.
    @property
    def T(self) -> float:
        """Symbol duration, 1/R (s)."""
        return 1.0 / self.R

    @property
    def M(self) -> float:
        """Modes per symbol, W/R (real-valued, not rounded)."""
        return self.W / self.R

    @property
    def N_B(self) -> float:
        """Brightness of Bob's amplifier spontaneous emission, G_B - 1."""
        return self.G_B - 1.0

    @property
    def kappa_S(self) -> float:
        """One-way path transmissivity for (L, alpha)."""
        return path_transmissivity(self.L, self.alpha)

    @classmethod
    def from_dict(cls, doc: dict) -> "ProtocolParams":
        """Build from a flat key-value document (see DEFAULT_PARAMS keys + N_S).

        Missing keys take their default values; unknown keys are rejected.
        """
        unknown = set(doc) - set(_JSON_TO_FIELD)
        if unknown:
            raise DomainError(f"unknown parameter keys: {sorted(unknown)}")
        kwargs = {}
        for key, name in _JSON_TO_FIELD.items():
            if key in doc:
                value = doc[key]
                kwargs[name] = int(value) if name == "K" else float(value)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str) -> "ProtocolParams":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise DomainError(f"parameter file {path!r} must hold a JSON object")
        return cls.from_dict(doc)


@dataclass(frozen=True)
class GaussianChannel:
    """Per-symbol measurement model: mean radius r, per-quadrature sigma."""

    r: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0):
            raise DomainError(f"r must be finite and >= 0, got {self.r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be finite and > 0, got {self.sigma}")

    @property
    def snr(self) -> float:
        return self.r ** 2 / self.sigma ** 2

    @classmethod
    def from_snr(cls, snr: float) -> "GaussianChannel":
        """Channel with the given SNR in unit-noise normalization (sigma = 1)."""
        if snr < 0 or not math.isfinite(snr):
            raise DomainError(f"snr must be finite and >= 0, got {snr}")
        return cls(r=math.sqrt(snr), sigma=1.0)


def link_budget(p: ProtocolParams) -> GaussianChannel:
    """Map protocol parameters to the Gaussian measurement channel.

    Uses the heuristic documented in the module docstring.  Requires N_S.
    """
    if p.N_S is None:
        raise DomainError("link_budget requires N_S (source brightness) to be set")
    ks = p.kappa_S
    m = p.M
    r_sq = p.eta * m * ks ** 2 * p.G_B * (1.0 - p.kappa_A) * (1.0 - p.kappa_B) * p.N_S
    sigma_sq = (1.0 + p.eta * ks * p.N_B) / 2.0
    return GaussianChannel(r=math.sqrt(r_sq), sigma=math.sqrt(sigma_sq))
