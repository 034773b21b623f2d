"""Single-photon monitoring taps: count simulation, the intrusion-parameter
estimator, and the received-flux consistency check.

Count-rate model
----------------
This is a deliberately simple toy model, chosen so the intrusion estimator is
exactly unbiased at the rate level.  All idler-tap correlation is carried by
the downconverter fraction 1/(n+1) of Alice's light; detector efficiencies
are 1, dark counts 0, and a single coincidence-gate width governs
accidentals.  With F = N_S*W/(n+1) the correlated pair flux:

    S_I = F                                    idler singles
    S_A = kappa_A * N_S * W                    Alice tap singles
    S_B = kappa_B * kappa_S * (1-kappa_A) * N_S * W    Bob tap singles
    true C_IA = kappa_A * F
    true C_IB = (1 - f_true) * kappa_B * kappa_S * (1-kappa_A) * F
    accidentals = S_I * S_tap * gate   (identical in aligned and shifted windows)

The intruder replaces a fraction f_true of the correlated light while
preserving Bob's received flux, so S_B is independent of f_true and the flux
check alone cannot see her.  Every counting channel is drawn as an
independent Poisson variable; joint point-process structure is out of scope,
which means empirical coincidence rates can exceed tap singles by
fluctuation even though the model rates never do (that consistency is
enforced on the model rates at simulation time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoCorrelationError
from .link import ProtocolParams
from .streams import philox_stream

DEFAULT_GATE_S = 1e-9


@dataclass(frozen=True)
class MonitorCounts:
    """Singles and coincidence rates (counts/s) accumulated over duration (s).

    The *_shift fields are the time-shifted coincidence rates, which contain
    accidentals only.
    """

    S_I: float
    S_A: float
    S_B: float
    C_IA: float
    C_IB: float
    C_IA_shift: float
    C_IB_shift: float
    duration: float

    def __post_init__(self):
        rates = (self.S_I, self.S_A, self.S_B, self.C_IA, self.C_IB,
                 self.C_IA_shift, self.C_IB_shift)
        if any(r < 0 or not math.isfinite(r) for r in rates):
            raise DomainError("all rates must be finite and >= 0")
        if not self.duration > 0:
            raise DomainError(f"duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class IntrusionEstimate:
    """Estimated intrusion parameter: clamped value, raw value, standard error."""

    value: float
    raw: float
    stderr: float


def intrusion_parameter(c: MonitorCounts) -> IntrusionEstimate:
    """Estimate the fraction of Bob's light not originating from Alice.

    raw = 1 - [(C_IB - C_IB_shift)/S_B] / [(C_IA - C_IA_shift)/S_A]; the
    value is clamped to [0, 1] since sampling noise can push the raw number
    slightly outside.  The standard error propagates independent Poisson
    fluctuations of all six counting channels through the formula.
    """
    if c.S_A <= 0 or c.S_B <= 0:
        raise DomainError("singles rates S_A and S_B must be positive")
    u = c.C_IB - c.C_IB_shift
    v = c.C_IA - c.C_IA_shift
    if v <= 0:
        raise NoCorrelationError(
            "reference arm has no excess coincidences (C_IA <= C_IA_shift); "
            "estimator undefined"
        )
    raw = 1.0 - (u / c.S_B) / (v / c.S_A)

    # Delta method with Var(rate) = rate/duration per channel.
    var_u = (c.C_IB + c.C_IB_shift) / c.duration
    var_v = (c.C_IA + c.C_IA_shift) / c.duration
    var_a = c.S_A / c.duration
    var_b = c.S_B / c.duration
    a, b = c.S_A, c.S_B
    var = (
        (a / (v * b)) ** 2 * var_u
        + (u / (v * b)) ** 2 * var_a
        + (u * a / (v * v * b)) ** 2 * var_v
        + (u * a / (v * b * b)) ** 2 * var_b
    )
    return IntrusionEstimate(value=min(1.0, max(0.0, raw)), raw=raw, stderr=math.sqrt(var))


def expected_counts(
    p: ProtocolParams, f_true: float, gate: float = DEFAULT_GATE_S, duration: float = 1.0
) -> MonitorCounts:
    """Model expectation rates for one scenario (no sampling noise)."""
    if not 0 <= f_true <= 1:
        raise DomainError(f"f_true must lie in [0, 1], got {f_true}")
    if gate <= 0:
        raise DomainError(f"gate must be > 0, got {gate}")
    if p.N_S is None:
        raise DomainError("monitoring requires N_S to be set")
    ks = p.kappa_S
    flux = p.N_S * p.W
    pair_flux = flux / (p.n + 1.0)
    s_i = pair_flux
    s_a = p.kappa_A * flux
    s_b = p.kappa_B * ks * (1.0 - p.kappa_A) * flux
    acc_ia = s_i * s_a * gate
    acc_ib = s_i * s_b * gate
    c_ia = p.kappa_A * pair_flux + acc_ia
    c_ib = (1.0 - f_true) * p.kappa_B * ks * (1.0 - p.kappa_A) * pair_flux + acc_ib
    for coinc, singles in ((c_ia, (s_i, s_a)), (c_ib, (s_i, s_b))):
        if coinc > min(singles):
            raise DomainError(
                "model coincidence rate exceeds a singles rate; reduce N_S or the "
                "gate width (accidentals are saturating a tap)"
            )
    return MonitorCounts(
        S_I=s_i, S_A=s_a, S_B=s_b,
        C_IA=c_ia, C_IB=c_ib, C_IA_shift=acc_ia, C_IB_shift=acc_ib,
        duration=duration,
    )


def simulate_counts(
    p: ProtocolParams,
    f_true: float,
    duration: float,
    gate: float = DEFAULT_GATE_S,
    seed: int = 0,
    scenario: int = 0,
) -> MonitorCounts:
    """Draw one monitoring record: independent Poisson counts at the model rates.

    ``scenario`` selects an independent substream of ``seed``, so a batch of
    scenarios can share one seed without sharing randomness.
    """
    if duration <= 0:
        raise DomainError(f"duration must be > 0, got {duration}")
    mean = expected_counts(p, f_true, gate, duration)
    gen = philox_stream(seed, spawn_key=(scenario,))
    draws = [
        gen.poisson(rate * duration) / duration
        for rate in (mean.S_I, mean.S_A, mean.S_B, mean.C_IA, mean.C_IB,
                     mean.C_IA_shift, mean.C_IB_shift)
    ]
    return MonitorCounts(
        S_I=draws[0], S_A=draws[1], S_B=draws[2],
        C_IA=draws[3], C_IB=draws[4], C_IA_shift=draws[5], C_IB_shift=draws[6],
        duration=duration,
    )


@dataclass(frozen=True)
class FluxCheck:
    """Outcome of the received-flux consistency test."""

    z: float
    passed: bool


def flux_check(c: MonitorCounts, expected_S_B: float, z_threshold: float = 5.0) -> FluxCheck:
    """Compare Bob's tap singles against the rate expected with no intruder.

    z = (S_B - expected) * sqrt(duration) / sqrt(expected), i.e. the observed
    deviation in Poisson standard deviations; passes iff |z| <= z_threshold.
    """
    if expected_S_B <= 0:
        raise DomainError(f"expected_S_B must be > 0, got {expected_S_B}")
    if not c.duration > 0:
        raise DomainError(f"duration must be > 0, got {c.duration}")
    z = (c.S_B - expected_S_B) * math.sqrt(c.duration) / math.sqrt(expected_S_B)
    return FluxCheck(z=z, passed=abs(z) <= z_threshold)
