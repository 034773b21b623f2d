"""KPSK symbol geometry and the minimum-error nearest-point decision rule.

Symbol k sits on the unit circle at angle 2*pi*k/K.  Because the receiver
noise is isotropic, the minimum-error decision regions are the K wedges of
angular half-width pi/K centered on the symbol angles; deciding a point
reduces to locating its phase within those wedges.  Scaling to a physical
radius is the channel's job, not stored here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidAlphabetError

TWO_PI = 2.0 * math.pi

# A received point whose phase lies within a few ulps of a wedge boundary is
# treated as exactly on it, so the documented tie-break (lower adjacent symbol
# index) is honored even when the boundary point itself was constructed via
# cos/sin and carries 1-ulp libm rounding.
_TIE_ULPS = 8.0 * (2.0 ** -52)


@dataclass(frozen=True)
class IQPoint:
    """One dual-homodyne measurement outcome (channel-normalized units)."""

    I: float
    Q: float

    def __post_init__(self):
        if not (math.isfinite(self.I) and math.isfinite(self.Q)):
            raise DomainError(f"IQPoint components must be finite, got ({self.I}, {self.Q})")


@dataclass(frozen=True)
class Constellation:
    """K unit-circle points at angles 2*pi*k/K, k = 0..K-1."""

    K: int
    angles: tuple[float, ...]

    def __post_init__(self):
        if self.K < 2:
            raise InvalidAlphabetError(f"alphabet size must be >= 2, got {self.K}")
        if len(self.angles) != self.K:
            raise DomainError("angle count must equal K")
        for k, a in enumerate(self.angles):
            if a != TWO_PI * k / self.K:
                raise DomainError(f"angle[{k}] must equal 2*pi*{k}/{self.K}")

    def point(self, k: int) -> IQPoint:
        """Unit-circle location of symbol k."""
        a = self.angles[k]
        return IQPoint(math.cos(a), math.sin(a))


def make_kpsk(K: int) -> Constellation:
    """Build the K-ary PSK constellation.

    Raises InvalidAlphabetError for K < 2.
    """
    if K < 2:
        raise InvalidAlphabetError(f"alphabet size must be >= 2, got {K}")
    return Constellation(K=K, angles=tuple(TWO_PI * k / K for k in range(K)))


def decide(p: IQPoint, c: Constellation) -> int:
    """Map a measured point to the nearest constellation symbol index.

    Equivalent to locating arg(p) in the wedge of half-width pi/K around each
    symbol angle.  Boundary phases resolve to the lower of the two adjacent
    symbol indices; the origin resolves to symbol 0.
    """
    if p.I == 0.0 and p.Q == 0.0:
        return 0
    phi = math.atan2(p.Q, p.I)  # (-pi, pi]
    x = phi * c.K / TWO_PI      # symbol units, in (-K/2, K/2]
    lo = math.floor(x)
    frac = x - lo
    if abs(frac - 0.5) <= _TIE_ULPS * max(1.0, abs(x)):
        return min(lo % c.K, (lo + 1) % c.K)
    if frac < 0.5:
        return lo % c.K
    return (lo + 1) % c.K


def boundary_angles(c: Constellation) -> tuple[float, ...]:
    """Wedge-boundary angles (2k+1)*pi/K, k = 0..K-1, each in [0, 2*pi)."""
    return tuple((2 * k + 1) * math.pi / c.K for k in range(c.K))


def rotate(p: IQPoint, angle: float) -> IQPoint:
    """Rotate a point counterclockwise by the given angle (radians)."""
    ca, sa = math.cos(angle), math.sin(angle)
    return IQPoint(p.I * ca - p.Q * sa, p.I * sa + p.Q * ca)
