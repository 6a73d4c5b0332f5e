"""Discretized filtered backprojection.

Per view: tabulate g_k = d/dp f_eps(alpha_k, p) on a uniform fine grid
(step eps/eta), apply the principal-value Hilbert filter

    F_k(q) = PV int g_k(p) / (p - q) dp

by singularity subtraction on the finite interval [A, B] that contains
the data support,

    F_k(q) = int (g_k(p) - g_k(q)) / (p - q) dp  +  g_k(q) ln((B-q)/(q-A)),

with the first integral done by the trapezoid rule (the removable point
p = q contributes g_k'(q)).  The reconstruction is the weighted view sum

    f_rec(x) = -(dalpha / (2 pi^2)) sum_k F_k(Phi(alpha_k, x)),

with F_k read off the fine grid by cubic interpolation.  The same
subtraction formula is valid for q outside the data support (g_k(q) = 0,
no singularity), so the fine grid is simply extended to cover every
query point of the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .geometry import RadonFamily, SamplingScheme, phi_eval

__all__ = [
    "ReconConfig",
    "FilteredView",
    "pv_filter_uniform",
    "filter_view",
    "view_values_at",
    "backproject",
    "ReconstructionRun",
    "ImageGrid",
    "AliasProfile",
    "scaled_difference_profile",
]


@dataclass(frozen=True)
class ReconConfig:
    """Reconstruction discretization knobs.

    ``eta``: fine-grid oversampling, step = eps/eta.  ``margin_factor``:
    the filtering interval extends this many eps beyond the smoothed
    data support (the log endpoint term needs g = 0 at both ends).
    """

    eta: int = 16
    margin_factor: float = 6.0

    def __post_init__(self) -> None:
        if int(self.eta) != self.eta or self.eta < 2:
            raise ValueError("eta must be an integer >= 2")
        object.__setattr__(self, "eta", int(self.eta))
        if self.margin_factor < 4.0:
            raise ValueError("margin_factor below 4 leaves no room for the log term")


@dataclass(frozen=True)
class FilteredView:
    """One view's filtered data on a uniform q-grid."""

    k: int
    alpha: float
    start: float
    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 1 or self.values.size < 4:
            raise ValueError("filtered view needs at least 4 grid values")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("filtered view contains non-finite samples")

    @property
    def end(self) -> float:
        return self.start + self.step * (self.values.size - 1)


def pv_filter_uniform(g: np.ndarray, step: float, start: float) -> np.ndarray:
    """PV Hilbert filter of grid samples g on the uniform grid
    q_i = start + i*step, returned at the same nodes.

    Requires g to vanish at both grid ends (the data support must lie
    strictly inside).  The j = i term of the trapezoid sum is the
    removable limit g'(q_i); the subtracted constant integrates to the
    exact log endpoint term.
    """
    g = np.asarray(g, dtype=float)
    n = g.size
    if n < 4:
        raise ValueError("need at least 4 samples")
    if g[0] != 0.0 or g[-1] != 0.0:
        raise ValueError("data support reaches the filter grid boundary; increase the margin")

    trap = np.ones(n)
    trap[0] = trap[-1] = 0.5
    u = trap * g

    # S1_i = sum_{j != i} u_j / (j - i), an odd-kernel correlation
    m = np.arange(1, n, dtype=float)
    kernel = np.concatenate([-1.0 / m[::-1], [0.0], 1.0 / m])
    s1 = -fftconvolve(u, kernel)[n - 1 : 2 * n - 1]

    # c_i = sum_{j != i} trap_j / (j - i) via harmonic numbers
    harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1.0, n))])
    i = np.arange(n)
    c = harmonic[n - 1 - i] - harmonic[i]
    c[1:] += 0.5 / i[1:]
    c[:-1] -= 0.5 / (n - 1 - i[:-1])

    gp = np.empty(n)
    gp[1:-1] = (g[2:] - g[:-2]) / (2.0 * step)
    gp[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * step)
    gp[-1] = (3.0 * g[-1] - 4.0 * g[-2] + g[-3]) / (2.0 * step)

    q = start + step * i
    log_term = np.zeros(n)
    inner = g != 0.0
    if inner[0] or inner[-1]:  # unreachable given the endpoint check above
        raise ValueError("nonzero data at the filter grid boundary")
    log_term[inner] = g[inner] * np.log((q[-1] - q[inner]) / (q[inner] - q[0]))

    return s1 - g * c + step * trap * gp + log_term


def filter_view(data, k: int, config: ReconConfig = ReconConfig(), q_range=None) -> FilteredView:
    """Build the FilteredView of view ``k`` from a semi-discrete data
    object (anything with scheme, view_angle, grid_support and
    data_smooth_deriv).

    ``q_range``: optional (lo, hi) of query values the view must cover,
    e.g. the Phi-range of an image grid; the fine grid is the union of
    this and the padded data support.
    """
    eps = data.scheme.epsilon
    step = eps / config.eta
    lo, hi = data.grid_support(k, margin=config.margin_factor * eps)
    if q_range is not None:
        lo = min(lo, q_range[0] - 2.0 * step)
        hi = max(hi, q_range[1] + 2.0 * step)
    count = int(math.ceil((hi - lo) / step)) + 1
    grid = lo + step * np.arange(max(count, 4))
    g = data.data_smooth_deriv(k, grid)
    return FilteredView(
        k=k,
        alpha=data.view_angle(k),
        start=lo,
        step=step,
        values=pv_filter_uniform(g, step, lo),
    )


def view_values_at(view: FilteredView, q) -> np.ndarray:
    """Cubic (Catmull-Rom) interpolation of the filtered samples."""
    q = np.asarray(q, dtype=float)
    n = view.values.size
    pos = (q - view.start) / view.step
    if np.any(pos < -1e-9) or np.any(pos > n - 1 + 1e-9):
        raise ValueError(
            "query outside the filtered q-grid; rebuild the views with a q_range covering the target points"
        )
    idx = np.clip(np.floor(pos).astype(int), 1, n - 3)
    s = pos - idx
    f = view.values
    p0, p1, p2, p3 = f[idx - 1], f[idx], f[idx + 1], f[idx + 2]
    return 0.5 * (
        2.0 * p1
        + (p2 - p0) * s
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s**2
        + (3.0 * p1 - p0 - 3.0 * p2 + p3) * s**3
    )


def backproject(views, x, family: RadonFamily, scheme: SamplingScheme):
    """Weighted view sum -(dalpha/(2 pi^2)) sum_k F_k(Phi(alpha_k, x)).

    ``x`` is one point (shape (2,)) or many (shape (m, 2)); the view sum
    runs in the fixed order of ``views``, so results do not depend on
    how callers partition the points.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 2:
        raise ValueError("points must have shape (..., 2)")
    total = np.zeros(pts.shape[0])
    for view in views:
        q = phi_eval(family, view.alpha, pts)
        total += view_values_at(view, q)
    total *= -scheme.delta_alpha / (2.0 * math.pi**2)
    return float(total[0]) if single else total


@dataclass(frozen=True)
class ReconstructionRun:
    """Bundle of filtered views ready for evaluation at points."""

    family: RadonFamily
    scheme: SamplingScheme
    views: tuple[FilteredView, ...]

    def evaluate(self, x):
        return backproject(self.views, x, self.family, self.scheme)


@dataclass(frozen=True)
class ImageGrid:
    """Raster of reconstruction values; pixel (iy, ix) is centered at
    origin + pixel_size*(ix, iy)."""

    origin: tuple[float, float]
    pixel_size: float
    width: int
    height: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.height, self.width):
            raise ValueError("values shape must be (height, width)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image contains non-finite values")
        if self.pixel_size <= 0:
            raise ValueError("pixel size must be positive")

    @classmethod
    def pixel_centers(cls, center, half_extent: float, pixel_size: float) -> np.ndarray:
        """(m*m, 2) pixel-center coordinates of a square field of view."""
        m = int(round(2.0 * half_extent / pixel_size))
        axis = np.arange(m) * pixel_size + (pixel_size / 2.0 - half_extent)
        xs = center[0] + axis
        ys = center[1] + axis
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    @classmethod
    def from_values(cls, center, half_extent: float, pixel_size: float, flat_values: np.ndarray) -> "ImageGrid":
        m = int(round(2.0 * half_extent / pixel_size))
        origin = (
            center[0] + pixel_size / 2.0 - half_extent,
            center[1] + pixel_size / 2.0 - half_extent,
        )
        return cls(origin, pixel_size, m, m, np.asarray(flat_values, float).reshape(m, m))


@dataclass
class AliasProfile:
    """Scaled reconstruction difference along x = x0 + eps*h*theta, with
    the matching prediction once the predictor fills it in."""

    x0: tuple[float, float]
    theta: tuple[float, float]
    h: np.ndarray
    recon_scaled: np.ndarray
    predicted: np.ndarray | None = None


def scaled_difference_profile(run: ReconstructionRun, x0, theta, h_samples) -> AliasProfile:
    """recon_scaled(h) = eps^(-1/2) (f_rec(x0 + eps*h*theta) - f_rec(x0))."""
    x0 = np.asarray(x0, dtype=float)
    theta = np.asarray(theta, dtype=float)
    h = np.asarray(h_samples, dtype=float)
    eps = run.scheme.epsilon
    points = x0[None, :] + eps * h[:, None] * theta[None, :]
    base = run.evaluate(x0)
    values = run.evaluate(points)
    recon_scaled = (values - base) / math.sqrt(eps)
    return AliasProfile(
        x0=(float(x0[0]), float(x0[1])),
        theta=(float(theta[0]), float(theta[1])),
        h=h,
        recon_scaled=recon_scaled,
    )
