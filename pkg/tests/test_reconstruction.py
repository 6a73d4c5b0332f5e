"""PV filtering, interpolation, backprojection, and the FBP pipeline
properties (linearity, shift relabeling, grid refinement)."""

import math

import numpy as np
import pytest

from aliaslab.forward_model import SemiDiscreteData, SinogramSampler
from aliaslab.geometry import (
    DiskPhantom,
    SamplingScheme,
    line_family,
    phi_eval,
)
from aliaslab.reconstruction import (
    FilteredView,
    ImageGrid,
    ReconConfig,
    ReconstructionRun,
    backproject,
    filter_view,
    pv_filter_uniform,
    scaled_difference_profile,
    view_values_at,
)
from aliaslab.special_functions import w_eval, w_prime_eval


def _pv_brute(g, step, start):
    """Direct O(n^2) evaluation of the singularity-subtracted trapezoid
    rule; same math as pv_filter_uniform without the convolution and
    harmonic-number shortcuts."""
    g = np.asarray(g, dtype=float)
    n = g.size
    trap = np.ones(n)
    trap[0] = trap[-1] = 0.5
    idx = np.arange(n)
    q = start + step * idx
    gp = np.empty(n)
    gp[1:-1] = (g[2:] - g[:-2]) / (2.0 * step)
    gp[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * step)
    gp[-1] = (3.0 * g[-1] - 4.0 * g[-2] + g[-3]) / (2.0 * step)
    out = np.empty(n)
    for i in range(n):
        j = idx[idx != i]
        out[i] = np.sum(trap[j] * (g[j] - g[i]) / (j - i)) + step * trap[i] * gp[i]
        if g[i] != 0.0:
            out[i] += g[i] * math.log((q[-1] - q[i]) / (q[i] - q[0]))
    return out


def _pv_mollifier_derivative_oracle(v):
    """Closed form of PV int_{-1}^{1} w'(p)/(p - v) dp for the quartic
    mollifier, valid for any v != +-1 (polynomial continuation outside)."""
    v = np.asarray(v, dtype=float)
    poly = -(15.0 / 4.0) * v * (1.0 - v * v)
    with np.errstate(divide="ignore"):
        log = np.log(np.abs((1.0 - v) / (1.0 + v)))
    return -(15.0 / 4.0) * (4.0 / 3.0 - 2.0 * v * v) + poly * log


class TestPVFilter:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        n, step, start = 257, 0.031, -3.7
        q = start + step * np.arange(n)
        # polynomial window forces exact zeros at both grid ends
        g = (q - q[0]) * (q[-1] - q) * np.sin(1.7 * q + rng.uniform(0, 2 * math.pi))
        fast = pv_filter_uniform(g, step, start)
        brute = _pv_brute(g, step, start)
        assert np.max(np.abs(fast - brute)) <= 1e-11 * max(1.0, np.max(np.abs(brute)))

    def test_closed_form_mollifier_oracle(self):
        # smoothed-point-mass data: g = w', whose PV integral is a known
        # polynomial-plus-log expression
        n = 8193
        step = 2.5 / (n - 1)
        start = -1.25
        q = start + step * np.arange(n)
        filtered = pv_filter_uniform(w_prime_eval(q), step, start)
        exact = _pv_mollifier_derivative_oracle(q)
        err = np.abs(filtered - exact)
        # w'' jumps at the support edges +-1; the trapezoid rule is first
        # order in a shrinking zone there and O(step^2) elsewhere
        away = np.abs(np.abs(q) - 1.0) >= 0.1
        assert np.max(err[away]) <= 1e-6
        assert np.max(err[~away]) <= 5e-3

    def test_zero_in_zero_out(self):
        out = pv_filter_uniform(np.zeros(64), 0.125, -4.0)
        assert np.all(out == 0.0)

    def test_even_data_vanishes_at_center(self):
        n = 201
        step = 0.01
        start = -1.0
        q = start + step * np.arange(n)
        g = w_eval(q / 0.3)
        out = pv_filter_uniform(g, step, start)
        assert abs(out[n // 2]) <= 1e-8

    def test_rejects_nonzero_endpoints(self):
        g = np.ones(16)
        with pytest.raises(ValueError, match="support"):
            pv_filter_uniform(g, 0.1, 0.0)
        g = np.zeros(16)
        g[-1] = 1e-14
        with pytest.raises(ValueError, match="support"):
            pv_filter_uniform(g, 0.1, 0.0)

    def test_rejects_tiny_grids(self):
        with pytest.raises(ValueError, match="4 samples"):
            pv_filter_uniform(np.zeros(3), 0.1, 0.0)


class TestInterpolation:
    def _view(self, values, start=2.0, step=0.25):
        return FilteredView(k=0, alpha=0.3, start=start, step=step, values=values)

    def test_reproduces_quadratics(self):
        start, step, n = -1.0, 0.05, 81
        q = start + step * np.arange(n)
        coeffs = (0.7, -1.3, 0.4)
        values = coeffs[0] + coeffs[1] * q + coeffs[2] * q**2
        view = self._view(values, start, step)
        rng = np.random.default_rng(2)
        probes = rng.uniform(q[0], q[-1], 200)
        expected = coeffs[0] + coeffs[1] * probes + coeffs[2] * probes**2
        assert np.max(np.abs(view_values_at(view, probes) - expected)) <= 1e-12

    def test_exact_at_interior_nodes(self):
        values = np.array([3.0, -1.0, 4.0, 1.0, -5.0, 9.0])
        view = self._view(values)
        nodes = view.start + view.step * np.arange(1, 5)
        assert np.array_equal(view_values_at(view, nodes), values[1:5])

    def test_outside_grid_raises(self):
        view = self._view(np.zeros(8))
        with pytest.raises(ValueError, match="outside"):
            view_values_at(view, view.start - 0.1)
        with pytest.raises(ValueError, match="outside"):
            view_values_at(view, view.end + 0.1)


class TestValidation:
    def test_filtered_view_needs_four_finite_samples(self):
        with pytest.raises(ValueError, match="4 grid values"):
            FilteredView(0, 0.0, 0.0, 0.1, np.zeros(3))
        bad = np.array([0.0, np.nan, 0.0, 0.0])
        with pytest.raises(ValueError, match="finite"):
            FilteredView(0, 0.0, 0.0, 0.1, bad)

    def test_recon_config_bounds(self):
        with pytest.raises(ValueError, match="eta"):
            ReconConfig(eta=1)
        with pytest.raises(ValueError, match="margin"):
            ReconConfig(margin_factor=3.0)

    def test_image_grid_validation(self):
        with pytest.raises(ValueError, match="shape"):
            ImageGrid((0.0, 0.0), 0.1, 4, 4, np.zeros((4, 3)))
        bad = np.zeros((2, 2))
        bad[0, 0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            ImageGrid((0.0, 0.0), 0.1, 2, 2, bad)
        with pytest.raises(ValueError, match="pixel"):
            ImageGrid((0.0, 0.0), -0.1, 2, 2, np.zeros((2, 2)))


class _ZeroSampler:
    def value(self, alpha, p):
        return np.zeros(np.shape(p)) if np.ndim(p) else 0.0

    def support(self, alpha):
        return -0.5, 0.5

    def kinks(self, alpha):
        return ()


class _SumSampler:
    """Pointwise sum of two analytic sinograms (the forward model of two
    disjoint phantoms)."""

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def value(self, alpha, p):
        return self.first.value(alpha, p) + self.second.value(alpha, p)

    def support(self, alpha):
        lo1, hi1 = self.first.support(alpha)
        lo2, hi2 = self.second.support(alpha)
        return min(lo1, lo2), max(hi1, hi2)

    def kinks(self, alpha):
        return tuple(sorted((*self.first.kinks(alpha), *self.second.kinks(alpha))))


def _build_run(sampler, scheme, q_range, eta=8):
    family = line_family()
    data = SemiDiscreteData(scheme, sampler, quad_order=16)
    config = ReconConfig(eta=eta)
    views = tuple(filter_view(data, k, config, q_range) for k in scheme.window_view_indices())
    return ReconstructionRun(family, scheme, views)


class TestBackprojection:
    def test_zero_data_reconstructs_zero(self):
        scheme = SamplingScheme.half_circle(0.05, 20)
        run = _build_run(_ZeroSampler(), scheme, (-4.0, 4.0))
        pts = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]])
        assert np.all(run.evaluate(pts) == 0.0)

    def test_single_view_linear_filter_values(self):
        # with F(q) = q the sum collapses to -dalpha/(2 pi^2) * Phi
        scheme = SamplingScheme.half_circle(0.05, 40)
        family = line_family()
        alpha = scheme.view_angles()[7]
        grid = -6.0 + 0.01 * np.arange(1201)
        view = FilteredView(k=7, alpha=alpha, start=-6.0, step=0.01, values=grid.copy())
        x = np.array([1.3, -2.1])
        expected = -scheme.delta_alpha / (2.0 * math.pi**2) * phi_eval(family, alpha, x)
        assert backproject([view], x, family, scheme) == pytest.approx(expected, rel=1e-12)

    def test_point_partition_is_bitwise_stable(self):
        phantom = DiskPhantom((0.5, -0.25), 1.5)
        scheme = SamplingScheme.half_circle(0.05, 24)
        run = _build_run(SinogramSampler(line_family(), phantom), scheme, (-4.0, 4.0))
        pts = np.array([[0.1, 0.2], [1.0, -1.0], [2.5, 0.0], [-0.7, 0.9]])
        batched = run.evaluate(pts)
        singles = np.array([run.evaluate(p) for p in pts])
        assert np.array_equal(batched, singles)


class TestPipelineProperties:
    def test_linear_in_disjoint_phantoms(self):
        # reconstruction of the sum of two disjoint disks equals the sum
        # of the reconstructions
        fam = line_family()
        disk_a = DiskPhantom((2.0, 1.0), 1.0, 1.0)
        disk_b = DiskPhantom((-3.0, -2.0), 1.5, -0.7)
        scheme = SamplingScheme.half_circle(0.05, 40, shift=0.2)
        q_range = (-9.0, 9.0)
        sampler_a = SinogramSampler(fam, disk_a)
        sampler_b = SinogramSampler(fam, disk_b)
        run_a = _build_run(sampler_a, scheme, q_range)
        run_b = _build_run(sampler_b, scheme, q_range)
        run_ab = _build_run(_SumSampler(sampler_a, sampler_b), scheme, q_range)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-5.0, 5.0, (40, 2))
        combined = run_ab.evaluate(pts)
        split = run_a.evaluate(pts) + run_b.evaluate(pts)
        assert np.max(np.abs(combined - split)) <= 1e-9

    def test_integer_shift_relabels_views(self):
        # delta and delta + 1 sample the same set of lines (mod pi), so
        # the scaled profile must be unchanged
        fam = line_family()
        phantom = DiskPhantom((0.0, 0.0), 2.0)
        x0 = np.array([2.5, 1.8])
        h = np.arange(-2.0, 2.01, 0.5)
        profiles = []
        for shift in (0.37, 1.37):
            scheme = SamplingScheme.half_circle(0.05, 64, shift=shift)
            run = _build_run(SinogramSampler(fam, phantom), scheme, (-7.0, 7.0))
            theta = x0 / np.hypot(*x0)
            profiles.append(scaled_difference_profile(run, x0, theta, h).recon_scaled)
        assert np.max(np.abs(profiles[0] - profiles[1])) <= 1e-9

    def test_profile_vanishes_at_h_zero(self):
        fam = line_family()
        phantom = DiskPhantom((0.0, 0.0), 2.0)
        scheme = SamplingScheme.half_circle(0.05, 24)
        run = _build_run(SinogramSampler(fam, phantom), scheme, (-6.0, 6.0))
        profile = scaled_difference_profile(run, (2.5, 1.8), (0.6, 0.8), np.array([-1.0, 0.0, 1.0]))
        assert profile.recon_scaled[1] == 0.0

    def test_eta_refinement_is_small(self):
        fam = line_family()
        phantom = DiskPhantom((0.0, 0.0), 2.0)
        scheme = SamplingScheme.half_circle(0.05, 48, shift=0.1)
        x0 = np.array([2.5, 1.8])
        theta = x0 / np.hypot(*x0)
        h = np.arange(-3.0, 3.01, 0.25)
        sampler = SinogramSampler(fam, phantom)
        coarse = scaled_difference_profile(
            _build_run(sampler, scheme, (-6.0, 6.0), eta=8), x0, theta, h
        ).recon_scaled
        fine = scaled_difference_profile(
            _build_run(sampler, scheme, (-6.0, 6.0), eta=16), x0, theta, h
        ).recon_scaled
        assert np.max(np.abs(coarse - fine)) <= 0.01 * np.ptp(fine)


class TestImageGrid:
    def test_pixel_centers_match_from_values(self):
        center, half, px = (1.0, -2.0), 0.5, 0.125
        pts = ImageGrid.pixel_centers(center, half, px)
        grid = ImageGrid.from_values(center, half, px, np.arange(pts.shape[0], dtype=float))
        assert grid.width == grid.height == 8
        # pixel (iy, ix) sits at origin + px*(ix, iy)
        iy, ix = 5, 2
        flat = iy * grid.width + ix
        assert pts[flat, 0] == pytest.approx(grid.origin[0] + px * ix)
        assert pts[flat, 1] == pytest.approx(grid.origin[1] + px * iy)
        assert grid.values[iy, ix] == flat

    def test_field_of_view_is_centered(self):
        pts = ImageGrid.pixel_centers((0.0, 0.0), 1.0, 0.25)
        assert pts.shape == (64, 2)
        assert np.max(pts) == pytest.approx(1.0 - 0.125)
        assert np.min(pts) == pytest.approx(-1.0 + 0.125)
