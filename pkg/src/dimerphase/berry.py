"""Geometric phases for a pair of levels split by a weak perturbation.

A degenerate pair is lifted by a perturbation whose matrix elements between
the two unperturbed states define a frame: polar angle theta from the
diagonal imbalance, azimuth phi from the off-diagonal phase.  Driving the
frame around a closed loop produces one geometric phase per level.  The two
states need not be orthogonal; their constant overlap modulus s deforms both
phases through Delta_pm = 1 +/- sin(theta)*s.

All loop integrals use trapezoid quadrature on the stored samples, which is
spectrally accurate for smooth periodic integrands.  Phases are reported
reduced to [0, 2*pi).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateFrameError,
    InvalidStateError,
    LoopTooCoarseError,
    NearSingularLoopError,
    SingularLimitError,
)
from .model import Eigenstate, state_overlap

TWO_PI = 2.0 * math.pi

# Lower bound on 1 - sin(theta)*s (general quadrature) and 1 - sin(theta)
# (unit-overlap limit) before the integrands are declared singular.
SINGULARITY_GUARD = 1e-6


def _wrap(x: float) -> float:
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    if TWO_PI - y < 1e-12:
        y = 0.0
    return y


@dataclass(frozen=True)
class PerturbationFrame:
    """Perturbation matrix elements on a degenerate pair, plus derived angles.

    dnn, dn1n1   diagonal elements on levels n and n+1
    doff         off-diagonal element (n row, n+1 column)
    delta_e_plus/minus   split energies, mean +/- sqrt(mean-split^2 + |doff|^2)
    theta        in [0, pi], cos(theta) = (dnn - dn1n1) / splitting
    phi_angle    in [0, 2*pi), Arg(doff); 0 by convention when doff = 0
    overlap      modulus s of the unperturbed states' inner product, in [0, 1]
    """

    dnn: float
    dn1n1: float
    doff: complex
    delta_e_plus: float
    delta_e_minus: float
    theta: float
    phi_angle: float
    overlap: float


@dataclass(frozen=True)
class PhasePair:
    """Geometric phases (level n, level n+1), each in [0, 2*pi)."""

    gamma_n: float
    gamma_n1: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.gamma_n, self.gamma_n1)


@dataclass(frozen=True)
class FrameLoop:
    """Closed ordered frame samples; the overlap s is constant along the loop."""

    frames: tuple[PerturbationFrame, ...]
    overlap: float

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) < 3:
            raise ValueError("a loop needs at least three samples")
        for f in self.frames:
            if abs(f.overlap - self.overlap) > 1e-12:
                raise ValueError("all frames on a loop must share one overlap")


def frame_from_deltas(
    dnn: float, dn1n1: float, doff: complex, overlap: float
) -> PerturbationFrame:
    """Build a frame from perturbation matrix elements.

    Raises DegenerateFrameError when both the diagonal imbalance and the
    off-diagonal element vanish: the perturbation does not split the pair
    and no frame angles exist.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap modulus must lie in [0, 1]")
    dnn = float(dnn)
    dn1n1 = float(dn1n1)
    doff = complex(doff)
    delta = dnn - dn1n1
    k2 = delta * delta + 4.0 * (abs(doff) ** 2)
    if k2 == 0.0:
        raise DegenerateFrameError("perturbation leaves the pair degenerate")
    split = math.sqrt(k2)
    mean = 0.5 * (dnn + dn1n1)
    theta = math.acos(max(-1.0, min(1.0, delta / split)))
    phi_angle = (cmath.phase(doff) % TWO_PI) if doff != 0 else 0.0
    return PerturbationFrame(
        dnn=dnn,
        dn1n1=dn1n1,
        doff=doff,
        delta_e_plus=mean + 0.5 * split,
        delta_e_minus=mean - 0.5 * split,
        theta=theta,
        phi_angle=phi_angle,
        overlap=float(overlap),
    )


def frame_loop(
    theta: float | Sequence[float] | Callable[[float], float],
    overlap: float,
    n_points: int = 1024,
    magnitude: float = 1.0,
) -> FrameLoop:
    """Loop of frames with azimuth winding once through [0, 2*pi).

    theta may be a constant, a callable theta(phi), or an array of
    n_points + 1 samples.  Frames are built from matrix elements of size
    `magnitude`, which the angles do not depend on.
    """
    if n_points < 3:
        raise ValueError("need at least three loop segments")
    phis = np.linspace(0.0, TWO_PI, n_points + 1)
    if callable(theta):
        thetas = [float(theta(p)) for p in phis]
    elif np.ndim(theta) == 0:
        thetas = [float(theta)] * (n_points + 1)
    else:
        thetas = [float(t) for t in theta]
        if len(thetas) != n_points + 1:
            raise ValueError("theta array must have n_points + 1 samples")

    frames = []
    for p, t in zip(phis, thetas):
        f = frame_from_deltas(
            0.5 * magnitude * math.cos(t),
            -0.5 * magnitude * math.cos(t),
            0.5 * magnitude * math.sin(t) * cmath.exp(1j * p),
            overlap,
        )
        # A sample sitting exactly at a pole has doff = 0 and loses its
        # azimuth; restore the loop coordinate so quadrature spacing survives.
        if f.doff == 0:
            f = replace(f, phi_angle=p % TWO_PI)
        frames.append(f)
    return FrameLoop(tuple(frames), float(overlap))


def _segments(loop: FrameLoop) -> Iterable[tuple[PerturbationFrame, PerturbationFrame, float]]:
    frames = loop.frames
    for k in range(len(frames) - 1):
        a, b = frames[k], frames[k + 1]
        dphi = math.remainder(b.phi_angle - a.phi_angle, TWO_PI)
        yield a, b, dphi


def _loop_integral(loop: FrameLoop, integrand: Callable[[float], float]) -> float:
    """Trapezoid integral of a function of theta against d(phi) around the loop."""
    total = 0.0
    for a, b, dphi in _segments(loop):
        total += 0.5 * (integrand(a.theta) + integrand(b.theta)) * dphi
    return total


def solid_angle(loop: FrameLoop) -> float:
    """Oriented solid angle enclosed by the frame axis, integral of (1 - cos theta) d(phi)."""
    return _loop_integral(loop, lambda t: 1.0 - math.cos(t))


def _check_minus_guard(loop: FrameLoop) -> None:
    s = loop.overlap
    for f in loop.frames:
        if 1.0 - math.sin(f.theta) * s < SINGULARITY_GUARD:
            raise NearSingularLoopError(
                "1 - sin(theta)*s fell below the quadrature guard; "
                "use the unit-overlap limit instead"
            )


def berry_phase_perturbative(loop: FrameLoop) -> PhasePair:
    """Geometric phase pair from the full loop quadrature.

    gamma_n   = 1/2 int (1 - cos theta + s sin theta) / (1 + s sin theta) dphi
    gamma_n+1 = 1/2 int (1 + cos theta - s sin theta) / (1 - s sin theta) dphi
    """
    _check_minus_guard(loop)
    s = loop.overlap
    g_n = 0.5 * _loop_integral(
        loop, lambda t: (1.0 - math.cos(t) + s * math.sin(t)) / (1.0 + s * math.sin(t))
    )
    g_n1 = 0.5 * _loop_integral(
        loop, lambda t: (1.0 + math.cos(t) - s * math.sin(t)) / (1.0 - s * math.sin(t))
    )
    return PhasePair(_wrap(g_n), _wrap(g_n1))


def berry_phase_constant_theta(theta: float, overlap: float) -> PhasePair:
    """Closed form of the loop quadrature when theta is constant."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap modulus must lie in [0, 1]")
    s = overlap
    st, ct = math.sin(theta), math.cos(theta)
    if 1.0 - st * s < SINGULARITY_GUARD:
        raise NearSingularLoopError("constant-theta loop sits on the Delta_- singularity")
    g_n = math.pi * ((1.0 - ct) + s * st) / (1.0 + s * st)
    g_n1 = math.pi * ((1.0 + ct) - s * st) / (1.0 - s * st)
    return PhasePair(_wrap(g_n), _wrap(g_n1))


def berry_phase_small_overlap(loop: FrameLoop) -> PhasePair:
    """First order in s: +/- half the solid angle plus a shared linear correction.

    The correction coefficient is Omega_c'/4 + pi/2 with the companion integral
    Omega_c' = -int [1 + cos(pi/2 + 2 theta)] dphi, which reduces the error to
    O(s^2) against the full quadrature (and vanishes on the equator, where the
    exact phases are pi at every s).
    """
    s = loop.overlap
    om = solid_angle(loop)
    om_companion = -_loop_integral(
        loop, lambda t: 1.0 + math.cos(0.5 * math.pi + 2.0 * t)
    )
    corr = (0.25 * om_companion + 0.5 * math.pi) * s
    return PhasePair(_wrap(0.5 * om + corr), _wrap(-0.5 * om + corr))


def companion_solid_angle(loop: FrameLoop) -> float:
    """The auxiliary integral entering the small-overlap correction; -2*pi on the equator."""
    return -_loop_integral(loop, lambda t: 1.0 + math.cos(0.5 * math.pi + 2.0 * t))


def berry_phase_unit_overlap(loop: FrameLoop) -> PhasePair:
    """Limit s -> 1 of the loop quadrature.

    gamma_n   = 1/2 int [1 - cos theta / (1 + sin theta)] dphi
    gamma_n+1 = 1/2 int [1 + cos theta / (1 - sin theta)] dphi

    The sign pairing is fixed by matching the s -> 1 limit of the exact
    constant-theta expressions: level n takes the -cos/(1+sin) branch.
    Loops touching sin(theta) = 1 make the n+1 integrand blow up.
    """
    for f in loop.frames:
        if 1.0 - math.sin(f.theta) < SINGULARITY_GUARD:
            raise SingularLimitError("unit-overlap integrand singular at sin(theta) = 1")
    g_n = 0.5 * _loop_integral(
        loop, lambda t: 1.0 - math.cos(t) / (1.0 + math.sin(t))
    )
    g_n1 = 0.5 * _loop_integral(
        loop, lambda t: 1.0 + math.cos(t) / (1.0 - math.sin(t))
    )
    return PhasePair(_wrap(g_n), _wrap(g_n1))


def berry_phase_closed_form(v: float, energy: float) -> float:
    """Coupling-phase-loop geometric phase of a dimer stationary state.

    gamma = pi * (1 - sqrt(1 - v^2 / (4 E^2))), valid because every
    stationary state satisfies 4 E^2 >= v^2.
    """
    if v < 0.0:
        raise ValueError("coupling magnitude v must be >= 0")
    if v == 0.0:
        return 0.0
    if energy == 0.0 or 4.0 * energy * energy < v * v * (1.0 - 1e-12):
        raise InvalidStateError("4 E^2 >= v^2 fails: not a stationary-state energy")
    radicand = max(0.0, 1.0 - (v * v) / (4.0 * energy * energy))
    return math.pi * (1.0 - math.sqrt(radicand))


def berry_phase_discrete(branch: Sequence[Eigenstate]) -> float:
    """Gauge-invariant discrete loop phase, -Arg of the cyclic overlap product.

    The branch is treated cyclically, so passing the closing point twice is
    harmless (the duplicate factor is <psi|psi> = 1).  Any consecutive overlap
    with modulus below 0.5 means the loop is sampled too coarsely.
    """
    n = len(branch)
    if n < 16:
        raise ValueError("need at least 16 samples around the loop")
    total = 0.0
    for k in range(n):
        z = state_overlap(branch[k], branch[(k + 1) % n])
        if abs(z) < 0.5:
            raise LoopTooCoarseError(
                f"overlap modulus {abs(z):.3f} between samples {k} and {(k + 1) % n}"
            )
        total += cmath.phase(z)
    return _wrap(-total)
