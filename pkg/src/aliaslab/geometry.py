"""Curve families, disk phantoms, view sampling and tangency geometry.

Two families of integration curves are supported, both parametrized by a
view angle alpha and a scalar level p of a defining function Phi:

* ``line``: straight lines Phi(alpha, x) = cos(alpha) x1 + sin(alpha) x2,
  acquired over a half circle of view angles (a line reappears with the
  scalar negated after a half turn);
* ``circle``: circles centered on an acquisition circle of radius R,
  Phi(alpha, x) = |x - R*(cos alpha, sin alpha)|, acquired over the full
  circle of view angles.

Reconstruction artifacts at a probe point x0 are driven by the views
whose curve through x0 is tangent to the phantom boundary.  Each such
tangency is summarized by a :class:`TangencyDescriptor` carrying the
local geometry (tangency point, inward normal, curvature gap), the sweep
rate mu0 of the defining function past the tangent level, the fractional
view index k_star the tangency falls on, and the amplitude of the
predicted oscillation.  Orientation is normalized so that the curvature
gap is positive, flipping the scalar axis when the natural orientation
comes out negative; descriptors record when that happened.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "RadonFamily",
    "DiskPhantom",
    "SamplingScheme",
    "TangencyDescriptor",
    "line_family",
    "circle_family",
    "phi_eval",
    "grad_phi",
    "tangent_p",
    "tangency_enumerate",
    "mu0_closed_form",
    "mu0_numeric",
]

_TWO_PI = 2.0 * math.pi


def _unit(alpha: float) -> np.ndarray:
    return np.array([math.cos(alpha), math.sin(alpha)])


def _perp(alpha: float) -> np.ndarray:
    return np.array([-math.sin(alpha), math.cos(alpha)])


def _wrap_to_signed_pi(angle: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, _TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class RadonFamily:
    """Integration-curve family: ``line`` or ``circle`` (vertex on a
    circle of ``acquisition_radius``).  Both carry unit interior weight
    and unit reconstruction weight."""

    kind: str
    acquisition_radius: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("line", "circle"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "circle":
            if self.acquisition_radius is None or not self.acquisition_radius > 0:
                raise ValueError("circle family needs a positive acquisition_radius")
        elif self.acquisition_radius is not None:
            raise ValueError("line family takes no acquisition_radius")

    @property
    def angular_period(self) -> float:
        """Angle after which the same geometric curve recurs (for lines the
        scalar is negated across the half turn)."""
        return math.pi if self.kind == "line" else _TWO_PI


def line_family() -> RadonFamily:
    return RadonFamily("line")


def circle_family(acquisition_radius: float) -> RadonFamily:
    return RadonFamily("circle", acquisition_radius)


@dataclass(frozen=True)
class DiskPhantom:
    """Disk of constant interior value ``jump`` on background zero."""

    center: tuple[float, float]
    radius: float
    jump: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise ValueError("phantom radius must be positive")

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center)


@dataclass(frozen=True)
class SamplingScheme:
    """Semi-discrete acquisition: view grid plus scalar smoothing width.

    The view grid is ``alpha_k = alpha_origin + delta_alpha * (k + shift)``
    for k = 0..n_views-1 with ``delta_alpha = grid_span / n_views``.
    ``window``, when set, restricts backprojection (and tangency
    bookkeeping) to views inside the closed angular interval.
    """

    epsilon: float
    n_views: int
    grid_span: float
    alpha_origin: float
    shift: float = 0.0
    window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if int(self.n_views) != self.n_views or self.n_views < 1:
            raise ValueError("n_views must be a positive integer")
        object.__setattr__(self, "n_views", int(self.n_views))
        if not 0 < self.grid_span <= _TWO_PI + 1e-12:
            raise ValueError("grid_span must lie in (0, 2*pi]")
        if not math.isfinite(self.shift):
            raise ValueError("shift must be finite")
        if self.window is not None:
            lo, hi = float(self.window[0]), float(self.window[1])
            if not hi > lo:
                raise ValueError("window must have positive length")
            if hi - lo > _TWO_PI + 1e-12:
                raise ValueError("window longer than a full turn")
            object.__setattr__(self, "window", (lo, hi))

    @classmethod
    def half_circle(
        cls,
        epsilon: float,
        n_views: int,
        shift: float = 0.0,
        alpha_origin: float = -math.pi / 2,
        window: tuple[float, float] | None = None,
    ) -> "SamplingScheme":
        """Line-family grid covering a half circle of view angles."""
        return cls(epsilon, n_views, math.pi, alpha_origin, shift, window)

    @classmethod
    def full_circle(
        cls,
        epsilon: float,
        n_views: int,
        window: tuple[float, float] | None = None,
        shift: float = 0.0,
        alpha_origin: float = 0.0,
    ) -> "SamplingScheme":
        """Circle-family grid covering the full circle of view angles."""
        return cls(epsilon, n_views, _TWO_PI, alpha_origin, shift, window)

    @property
    def delta_alpha(self) -> float:
        return self.grid_span / self.n_views

    @property
    def kappa(self) -> float:
        """Ratio of angular step to scalar smoothing width."""
        return self.delta_alpha / self.epsilon

    def view_angles(self) -> np.ndarray:
        k = np.arange(self.n_views, dtype=float)
        return self.alpha_origin + self.delta_alpha * (k + self.shift)

    def contains_angle(self, alpha: float) -> bool:
        if self.window is None:
            return True
        lo, hi = self.window
        return (float(alpha) - lo) % _TWO_PI <= (hi - lo) + 1e-12

    def window_view_indices(self) -> np.ndarray:
        angles = self.view_angles()
        if self.window is None:
            return np.arange(self.n_views)
        lo, hi = self.window
        keep = (angles - lo) % _TWO_PI <= (hi - lo) + 1e-12
        return np.nonzero(keep)[0]


def phi_eval(family: RadonFamily, alpha, x):
    """Defining function Phi(alpha, x); its level sets are the curves.

    ``x`` has shape (..., 2) and broadcasts against ``alpha``.
    """
    x = np.asarray(x, dtype=float)
    al = np.asarray(alpha, dtype=float)
    ca, sa = np.cos(al), np.sin(al)
    if family.kind == "line":
        out = ca * x[..., 0] + sa * x[..., 1]
    else:
        R = family.acquisition_radius
        out = np.hypot(x[..., 0] - R * ca, x[..., 1] - R * sa)
        if np.any(out == 0.0):
            raise ValueError("Phi is undefined where x coincides with the curve vertex")
    if out.ndim == 0:
        return float(out)
    return out


def grad_phi(family: RadonFamily, alpha: float, x) -> np.ndarray:
    """Unit spatial gradient of Phi at (alpha, x); shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    if family.kind == "line":
        g = np.broadcast_to(_unit(float(alpha)), x.shape).copy()
        return g
    R = family.acquisition_radius
    d = x - R * _unit(float(alpha))
    norm = np.hypot(d[..., 0], d[..., 1])
    if np.any(norm == 0.0):
        raise ValueError("gradient undefined at the curve vertex")
    return d / norm[..., None]


def tangent_p(family: RadonFamily, phantom: DiskPhantom, alpha, branch: int):
    """Scalar level at which the view-``alpha`` curve is tangent to the
    phantom boundary; ``branch`` +1 gives the far-side value, -1 the
    near-side value.

    For lines this is ``<alpha_vec, center> + branch * radius``; for
    circles ``|vertex - center| + branch * radius`` with the vertex on
    the acquisition circle (the vertex must lie outside the phantom).
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    al = np.asarray(alpha, dtype=float)
    a = phantom.center_array
    if family.kind == "line":
        out = np.cos(al) * a[0] + np.sin(al) * a[1] + branch * phantom.radius
    else:
        R = family.acquisition_radius
        d = np.hypot(R * np.cos(al) - a[0], R * np.sin(al) - a[1])
        if np.any(d <= phantom.radius):
            raise ValueError("curve vertex inside the phantom: tangent level undefined")
        out = d + branch * phantom.radius
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class TangencyDescriptor:
    """Local data of one curve-boundary tangency seen from a probe point.

    Attributes
    ----------
    alpha_star, p_star
        View angle and scalar level of the tangent curve through the
        probe point, in the orientation-normalized parametrization.
    y0
        Tangency point on the phantom boundary.
    theta0
        Inward unit normal of the phantom at ``y0``.
    curvature_gap
        Positive second-order separation rate between the curve and the
        boundary at ``y0`` (1/radius for lines; sum or difference of the
        two curvatures for circles).
    u0
        Unit gradient of the defining function at the probe point.
    mu0
        Rate at which the curve through the probe sweeps past the tangent
        level as the view angle moves off alpha_star.
    k_star
        Fractional view-grid index aligned with the tangency; only its
        fractional part affects aliasing predictions.
    amplitude
        Signed amplitude multiplying the lattice aliasing sum in the
        oscillation prediction.
    branch
        -1 near-side tangent level, +1 far-side.
    flipped
        True when the scalar axis was negated to make curvature_gap
        positive (far-side circle tangencies).
    """

    alpha_star: float
    p_star: float
    y0: tuple[float, float]
    theta0: tuple[float, float]
    curvature_gap: float
    u0: tuple[float, float]
    mu0: float
    k_star: float
    amplitude: float
    branch: int
    flipped: bool


def _amplitude(scheme: SamplingScheme, curvature_gap: float, jump: float) -> float:
    return -(scheme.kappa / math.pi) * math.sqrt(2.0 / curvature_gap) * jump


def _line_descriptors(
    phantom: DiskPhantom, x0: np.ndarray, scheme: SamplingScheme
) -> list[TangencyDescriptor]:
    a = phantom.center_array
    r = phantom.radius
    v = x0 - a
    L = math.hypot(v[0], v[1])
    if L == r:
        raise ValueError("probe point lies on the phantom boundary")
    if L < r:
        return []
    beta = math.acos(r / L)
    phi_v = math.atan2(v[1], v[0])
    out = []
    for alpha_raw in (phi_v + math.pi - beta, phi_v - math.pi + beta):
        alpha_star = _wrap_to_signed_pi(alpha_raw)
        direction = _unit(alpha_star)
        p_star = float(direction @ a) - r
        y0 = a - r * direction
        theta0 = direction  # inward normal: (a - y0)/r
        mu0 = float(_perp(alpha_star) @ (x0 - y0))
        # grid index from the angle actually covered by the half-circle grid
        alpha_phys = scheme.alpha_origin + (alpha_star - scheme.alpha_origin) % math.pi
        k_star = (alpha_phys - scheme.alpha_origin) / scheme.delta_alpha - scheme.shift
        if not scheme.contains_angle(alpha_phys):
            continue
        M = 1.0 / r
        out.append(
            TangencyDescriptor(
                alpha_star=alpha_star,
                p_star=p_star,
                y0=(float(y0[0]), float(y0[1])),
                theta0=(float(theta0[0]), float(theta0[1])),
                curvature_gap=M,
                u0=(float(direction[0]), float(direction[1])),
                mu0=mu0,
                k_star=float(k_star),
                amplitude=_amplitude(scheme, M, phantom.jump),
                branch=-1,
                flipped=False,
            )
        )
    return out


def _circle_tangency_angles(
    R: float, a: np.ndarray, r: float, x0: np.ndarray
) -> list[float]:
    """All view angles whose curve through x0 is tangent to the phantom.

    Solving |vertex - a| - |vertex - x0| = +-r with vertex = R*(cos, sin)
    reduces, after squaring, to a quartic in tan(alpha/2); spurious roots
    from the squaring are discarded by a residual check after one round
    of Newton polish on the unsquared equation.
    """
    A = x0 - a
    C0 = float(a @ a - x0 @ x0 - r * r)
    B1 = 4.0 * R * C0 * A[0] + 8.0 * r * r * R * x0[0]
    B2 = 4.0 * R * C0 * A[1] + 8.0 * r * r * R * x0[1]
    D = C0 * C0 - 4.0 * r * r * (R * R + float(x0 @ x0))

    cos_half = Polynomial([1.0, 0.0, -1.0])  # (1+t^2) * cos(alpha)
    sin_half = Polynomial([0.0, 2.0])  # (1+t^2) * sin(alpha)
    one_plus = Polynomial([1.0, 0.0, 1.0])
    E = (
        4.0 * R * R * (A[0] * cos_half + A[1] * sin_half) ** 2
        + (B1 * cos_half + B2 * sin_half) * one_plus
        + D * one_plus**2
    )
    scale = float(np.max(np.abs(E.coef))) or 1.0

    candidates = []
    for root in E.roots():
        if abs(root.imag) <= 1e-8 * (1.0 + abs(root.real)):
            candidates.append(2.0 * math.atan(root.real))
    # tan-half parametrization misses alpha = pi; detect via the trig form
    e_at_pi = 4.0 * R * R * A[0] ** 2 - B1 + D
    if abs(e_at_pi) <= 1e-9 * scale:
        candidates.append(math.pi)

    def residual_and_slope(alpha: float) -> tuple[float, float, float]:
        vertex = R * _unit(alpha)
        da = vertex - a
        dx = vertex - x0
        d = math.hypot(da[0], da[1])
        rho = math.hypot(dx[0], dx[1])
        if rho == 0.0 or d == 0.0:
            return math.nan, math.nan, rho
        sigma = 1.0 if d - rho >= 0 else -1.0
        g = d - rho - sigma * r
        tang = R * _perp(alpha)
        gp = float(tang @ da) / d - float(tang @ dx) / rho
        return g, gp, rho

    polished = []
    for alpha in candidates:
        ok = False
        for _ in range(50):
            g, gp, rho = residual_and_slope(alpha)
            if not math.isfinite(g):
                break
            if abs(g) <= 1e-12 * (1.0 + R + r):
                ok = True
                break
            if gp == 0.0:
                break
            step = g / gp
            if abs(step) > 0.5:
                step = math.copysign(0.5, step)
            alpha -= step
        if ok and rho > 1e-12 * (1.0 + R):
            polished.append(_wrap_to_signed_pi(alpha))

    unique: list[float] = []
    for alpha in sorted(polished):
        if all(abs(_wrap_to_signed_pi(alpha - b)) > 1e-6 for b in unique):
            unique.append(alpha)
    return unique


def _circle_descriptors(
    family: RadonFamily,
    phantom: DiskPhantom,
    x0: np.ndarray,
    scheme: SamplingScheme,
) -> list[TangencyDescriptor]:
    R = family.acquisition_radius
    a = phantom.center_array
    r = phantom.radius
    sep = math.hypot(*(x0 - a))
    if sep == r:
        raise ValueError("probe point lies on the phantom boundary")
    if sep < r:
        return []
    out = []
    for alpha_star in _circle_tangency_angles(R, a, r, x0):
        vertex = R * _unit(alpha_star)
        d_vec = a - vertex
        d = math.hypot(d_vec[0], d_vec[1])
        if d <= r:
            continue  # vertex inside the phantom: outside the tangent-level domain
        rho_star = math.hypot(*(x0 - vertex))
        sigma = 1.0 if d > rho_star else -1.0  # +1: near-side tangency
        n_sc = d_vec / d
        y0 = vertex + rho_star * n_sc
        theta0 = (a - y0) / r
        u0 = (x0 - vertex) / rho_star
        mu0 = -R * float(_perp(alpha_star) @ (u0 - n_sc))
        M = 1.0 / rho_star + sigma / r
        flipped = M < 0
        if flipped:
            M, u0, mu0 = -M, -u0, -mu0
        if M == 0.0:
            raise ValueError(
                "degenerate tangency: curve and boundary curvatures coincide "
                f"at view angle {alpha_star:.6f} (contact order >= 2)"
            )
        if not scheme.contains_angle(alpha_star):
            continue
        k_star = ((alpha_star - scheme.alpha_origin) % _TWO_PI) / scheme.delta_alpha - scheme.shift
        out.append(
            TangencyDescriptor(
                alpha_star=alpha_star,
                p_star=rho_star,
                y0=(float(y0[0]), float(y0[1])),
                theta0=(float(theta0[0]), float(theta0[1])),
                curvature_gap=M,
                u0=(float(u0[0]), float(u0[1])),
                mu0=mu0,
                k_star=float(k_star),
                amplitude=_amplitude(scheme, M, phantom.jump),
                branch=-1 if sigma > 0 else 1,
                flipped=flipped,
            )
        )
    return out


def tangency_enumerate(
    family: RadonFamily,
    phantom: DiskPhantom,
    x0,
    scheme: SamplingScheme,
    window: tuple[float, float] | None = None,
) -> list[TangencyDescriptor]:
    """All tangencies of curves through ``x0`` with the phantom boundary
    whose view angle falls in the angular window (defaulting to the
    scheme's own window; None means no restriction).

    Returns an empty list when the probe point sits strictly inside the
    phantom (no curve through it is tangent to the boundary) and raises
    if it sits exactly on the boundary.  Descriptors are sorted by view
    angle for deterministic downstream iteration.
    """
    probe = np.asarray(x0, dtype=float)
    if probe.shape != (2,):
        raise ValueError("x0 must be a 2-vector")
    if window is not None:
        scheme = SamplingScheme(
            scheme.epsilon,
            scheme.n_views,
            scheme.grid_span,
            scheme.alpha_origin,
            scheme.shift,
            window,
        )
    if family.kind == "line":
        found = _line_descriptors(phantom, probe, scheme)
    else:
        found = _circle_descriptors(family, phantom, probe, scheme)
    return sorted(found, key=lambda t: t.alpha_star)


def mu0_closed_form(
    descriptor: TangencyDescriptor,
    family: RadonFamily,
    phantom: DiskPhantom,
    x0,
) -> float:
    """Closed-form sweep rate from the descriptor geometry.

    Lines: perp(alpha_star) . (x0 - y0).  Circles:
    -R * perp(alpha_star) . (u0 - theta0), which respects the recorded
    orientation because both vectors flip together.
    """
    probe = np.asarray(x0, dtype=float)
    perp = _perp(descriptor.alpha_star)
    if family.kind == "line":
        return float(perp @ (probe - np.asarray(descriptor.y0)))
    R = family.acquisition_radius
    return -R * float(perp @ (np.asarray(descriptor.u0) - np.asarray(descriptor.theta0)))


def mu0_numeric(
    family: RadonFamily,
    phantom: DiskPhantom,
    x0,
    alpha_star: float,
    branch: int,
    step: float = 1e-6,
) -> float:
    """Finite-difference sweep rate of Phi(alpha, x0) - tangent_p(alpha).

    Central differences at two step sizes combined by one Richardson
    extrapolation.  Returns the raw (unflipped) rate for the stated
    branch; descriptors with ``flipped`` set carry the negated value.
    """
    probe = np.asarray(x0, dtype=float)

    def f(alpha: float) -> float:
        return phi_eval(family, alpha, probe) - tangent_p(family, phantom, alpha, branch)

    def central(dd: float) -> float:
        return (f(alpha_star + dd) - f(alpha_star - dd)) / (2.0 * dd)

    return (4.0 * central(step / 2.0) - central(step)) / 3.0
