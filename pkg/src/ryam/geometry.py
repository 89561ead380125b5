"""Differential-geometric operators on gridded metrics.

Curvature follows the classical chain: Christoffel symbols from first
differences of the metric, Ricci from differences of the Christoffel field,
scalar curvature by contraction.  The Weyl norm subtracts the Schouten part
of the (0,4) curvature; in dimension 3 the Weyl tensor vanishes identically
and is returned as an exact zero field.

On sphere-cap charts the equirectangular fiber coordinates degenerate along
the fiber poles and at the cap center.  Finite differences there suffer the
usual polar-coordinate amplification, so scalar-curvature-type outputs are
smoothed on fixed coordinate bands around the singular rows: band values are
replaced by the adjacent regular ring average.  The bands do not shrink with
resolution, which keeps the smoothed field second-order convergent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import (
    ChartKind,
    Face,
    GridChart,
    MetricField,
    ScalarField,
    SymTensorField,
    compact_flux_divergence,
    face_slice,
    integrate,
    partial_derivative,
    tangential_axes,
)

#: half-width (radians) of the smoothing band around polar coordinate rows
POLAR_BAND = 0.35

_ORTHO_TOL = 1e-8


# ---------------------------------------------------------------------------
# polar-band smoothing


def smooth_polar_bands(values: np.ndarray, chart: GridChart, band: float = POLAR_BAND) -> np.ndarray:
    """Replace scalar values on polar coordinate bands by regular ring averages.

    Cap colatitude band (around the center pole): every in-band row takes the
    fiber-wide mean of the first regular row.  Fiber colatitude bands (around
    the fiber poles, where the last angle collapses): each in-band row takes
    the nearest regular row averaged over the collapsing angle.  No-op on
    charts without polar rows.
    """
    if chart.kind is ChartKind.SPHERE_CAP:
        colat_axis, avg_axes = 1, None  # average over every fiber direction
    elif chart.kind is ChartKind.CYLINDER and any(ax.cover == 2.0 for ax in chart.axes):
        colat_axis, avg_axes = 0, (0,)  # average over phi, keep the collar
    else:
        return values
    out = values.copy()

    ang = chart.axis_coordinates(colat_axis)
    if chart.dim == 4 and chart.kind is ChartKind.SPHERE_CAP:
        # Hopf fiber: degenerate at multiples of pi/2
        dist = np.min(np.abs(ang[:, None] - (np.pi / 2.0) * np.arange(5)[None, :]), axis=1)
    else:
        dist = np.minimum.reduce([ang, np.abs(ang - np.pi), 2 * np.pi - ang])
    mask2 = dist < band
    if mask2.any() and not mask2.all():
        idx = np.arange(len(mask2))
        regular = idx[~mask2]
        moved = np.moveaxis(out, colat_axis, 0)
        for i in idx[mask2]:
            j = regular[np.argmin(np.abs(regular - i))]
            src = moved[j]
            axes = tuple(range(1, src.ndim)) if avg_axes is None else avg_axes
            repl = src.mean(axis=axes, keepdims=True)
            moved[i] = np.broadcast_to(repl, src.shape)
        out = np.moveaxis(moved, 0, colat_axis)

    if chart.kind is ChartKind.SPHERE_CAP:
        th1 = chart.axis_coordinates(0)
        mask1 = th1 < band
        if mask1.any() and not mask1.all():
            edge = int(np.argmin(mask1))
            if edge + 1 < len(th1):
                m1, m2 = out[edge].mean(), out[edge + 1].mean()
                d1, d2 = th1[edge] ** 2, th1[edge + 1] ** 2
                for i in np.nonzero(mask1)[0]:
                    out[i] = m1 + (m2 - m1) * (th1[i] ** 2 - d1) / (d2 - d1)
            else:
                out[mask1] = out[edge].mean()
    return out


def smoothed_scalar(field: ScalarField, band: float = POLAR_BAND) -> ScalarField:
    return ScalarField(field.chart, smooth_polar_bands(field.values, field.chart, band))


# ---------------------------------------------------------------------------
# curvature

_pair_cache: dict[int, list[tuple[int, int]]] = {}


def _index_pairs(n: int) -> list[tuple[int, int]]:
    if n not in _pair_cache:
        _pair_cache[n] = [(m, v) for m in range(n) for v in range(m + 1, n)]
    return _pair_cache[n]


@dataclass(frozen=True)
class CurvatureBundle:
    """Christoffel symbols, Ricci, scalar curvature, and pointwise Weyl norm.

    ``scalar`` is polar-band smoothed on sphere caps; ``raw_scalar`` is the
    direct contraction g^{ab} Ric_ab at every node.
    """

    christoffel: np.ndarray  # [..., c, a, b] = Gamma^c_{ab}
    ricci: SymTensorField
    scalar: ScalarField
    weyl_norm: ScalarField
    raw_scalar: ScalarField

    @property
    def chart(self) -> GridChart:
        return self.ricci.chart


def _metric_derivatives(metric: MetricField):
    """First and second coordinate derivatives of the metric components.

    Returns (dg, d2g) with dg[..., c, a, b] = d_c g_ab and
    d2g[..., c, e, a, b] = d_c d_e g_ab.  Repeated directions use the direct
    second-derivative stencil; mixed ones apply the first-derivative stencil
    twice.  Only bounded metric components are ever differenced, which keeps
    finite-difference errors tame near polar coordinate rows.
    """
    chart = metric.chart
    n = chart.dim
    g = metric.values
    firsts = [partial_derivative(g, a, chart, 1, rank=2) for a in range(n)]
    dg = np.stack(firsts, axis=-3)
    d2g = np.empty(chart.extents + (n, n, n, n))
    for c in range(n):
        for e in range(c, n):
            if c == e:
                d2g[..., c, c, :, :] = partial_derivative(g, c, chart, 2, rank=2)
            else:
                flips = 1 if (chart.kind is ChartKind.SPHERE_CAP and e == 0) else 0
                mixed = partial_derivative(firsts[e], c, chart, 1, rank=2, extra_flips=flips)
                d2g[..., c, e, :, :] = mixed
                d2g[..., e, c, :, :] = mixed
    return dg, d2g


def christoffel_symbols(metric: MetricField) -> np.ndarray:
    chart = metric.chart
    g = metric.values
    ginv = metric.inverse()
    dg = np.stack(
        [partial_derivative(g, a, chart, 1, rank=2) for a in range(chart.dim)], axis=-3
    )
    gl = 0.5 * (dg + np.swapaxes(dg, -3, -1) - np.swapaxes(dg, -3, -2))
    # gl[..., a, d, b] = Gamma_{d a b}; contract the lowered slot
    return np.einsum("...rd,...adb->...rab", ginv, gl)


def curvature(metric: MetricField) -> CurvatureBundle:
    """Curvature data of a metric by second-order finite differences.

    Ricci is assembled from first and second differences of the metric with
    lowered Christoffel quadratic terms (rather than by differencing the
    Christoffel field, whose components are unbounded near polar rows of cap
    charts and would lose two orders of accuracy there).
    """
    chart = metric.chart
    n = chart.dim
    g = metric.values
    ginv = metric.inverse()
    dg, d2g = _metric_derivatives(metric)
    # dginv[..., c, a, b] = d_c g^{ab}
    dginv = -np.einsum("...ae,...cef,...fb->...cab", ginv, dg, ginv)
    # gl[..., d, a, b] = Gamma_{d a b} = 1/2 (d_a g_db + d_b g_da - d_d g_ab)
    gl = 0.5 * (
        np.einsum("...adb->...dab", dg) + np.einsum("...bda->...dab", dg) - dg
    )
    gamma = np.einsum("...rd,...dab->...rab", ginv, gl)

    # Ric_ab = d_c Gamma^c_ab - d_a Gamma^c_cb + Gamma^c_cd Gamma^d_ab
    #          - Gamma^c_ad Gamma^d_cb, expanded through g-derivatives
    t1 = np.einsum("...ccd,...dab->...ab", dginv, gl) + 0.5 * (
        np.einsum("...cd,...cadb->...ab", ginv, d2g)
        + np.einsum("...cd,...cbda->...ab", ginv, d2g)
        - np.einsum("...cd,...cdab->...ab", ginv, d2g)
    )
    # Gamma^c_cb = 1/2 g^{cd} d_b g_cd, so its a-derivative expands to:
    t2 = 0.5 * np.einsum("...acd,...bcd->...ab", dginv, dg) + 0.5 * np.einsum(
        "...cd,...abcd->...ab", ginv, d2g
    )
    trace_gamma = 0.5 * np.einsum("...ce,...dce->...d", ginv, dg)
    t3 = np.einsum("...d,...dab->...ab", trace_gamma, gamma)
    t4 = np.einsum("...cad,...dcb->...ab", gamma, gamma)
    ric = t1 - t2 + t3 - t4
    ric = 0.5 * (ric + np.swapaxes(ric, -1, -2))
    scal = np.einsum("...ab,...ab->...", ginv, ric)

    if n < 4:
        # the Weyl tensor vanishes identically below dimension 4
        weyl = np.zeros(chart.extents)
    else:
        weyl = _weyl_norm(g, ginv, gamma, gl, dginv, d2g, ric, scal)

    return CurvatureBundle(
        christoffel=gamma,
        ricci=SymTensorField(chart, ric),
        scalar=ScalarField(chart, smooth_polar_bands(scal, chart)),
        weyl_norm=ScalarField(chart, smooth_polar_bands(weyl, chart)),
        raw_scalar=ScalarField(chart, scal),
    )


def _riemann_slice(mu, nu, ginv, gamma, gl, dginv, d2g):
    """Rm^r_{s mu nu} for one antisymmetric pair, from metric derivatives."""

    def d_gamma_up(c, e):
        # d_c Gamma^r_{e s} as an [r, s] matrix field
        a1 = np.einsum("...rd,...ds->...rs", dginv[..., c, :, :], gl[..., :, e, :])
        b1 = 0.5 * np.einsum(
            "...rd,...ds->...rs",
            ginv,
            d2g[..., c, e, :, :]
            + np.swapaxes(d2g[..., c, :, :, e], -1, -2)
            - d2g[..., c, :, e, :],
        )
        return a1 + b1

    quad = np.einsum(
        "...rl,...ls->...rs", gamma[..., :, mu, :], gamma[..., :, nu, :]
    ) - np.einsum("...rl,...ls->...rs", gamma[..., :, nu, :], gamma[..., :, mu, :])
    return d_gamma_up(mu, nu) - d_gamma_up(nu, mu) + quad


def _weyl_norm(g, ginv, gamma, gl, dginv, d2g, ric, scal) -> np.ndarray:
    """Pointwise |Weyl|_g, streamed over antisymmetric index pairs."""
    n = g.shape[-1]
    schouten = (ric - scal[..., None, None] * g / (2.0 * (n - 1))) / (n - 2)
    pairs = _index_pairs(n)
    w_slices = []
    for mu, nu in pairs:
        rm_up = _riemann_slice(mu, nu, ginv, gamma, gl, dginv, d2g)
        rm = np.einsum("...ar,...rs->...as", g, rm_up)  # Rm_{a s mu nu}
        kul = (
            schouten[..., :, mu][..., :, None] * g[..., :, nu][..., None, :]
            - schouten[..., :, nu][..., :, None] * g[..., :, mu][..., None, :]
            + g[..., :, mu][..., :, None] * schouten[..., :, nu][..., None, :]
            - g[..., :, nu][..., :, None] * schouten[..., :, mu][..., None, :]
        )
        w_slices.append(rm - kul)
    norm_sq = np.zeros(g.shape[:-2])
    for p, (mu, nu) in enumerate(pairs):
        wu_p = np.einsum("...ac,...bd,...cd->...ab", ginv, ginv, w_slices[p])
        for q, (ka, la) in enumerate(pairs):
            pair_metric = 2.0 * (
                ginv[..., mu, ka] * ginv[..., nu, la] - ginv[..., mu, la] * ginv[..., nu, ka]
            )
            norm_sq += pair_metric * np.einsum("...ab,...ab->...", wu_p, w_slices[q])
    return np.sqrt(np.maximum(norm_sq, 0.0))


# ---------------------------------------------------------------------------
# boundary geometry


@dataclass(frozen=True)
class BoundaryGeometry:
    """Second fundamental form, mean curvature, and induced metric at a face.

    Sign convention: inward unit normal, A_ij = <nabla_i e_j, nu>, so a
    product collar has A = 0 and the boundary of a shrinking cap has H > 0.
    """

    chart: GridChart
    face: Face
    second_fundamental: np.ndarray  # (*face_extents, n-1, n-1)
    mean_curvature: np.ndarray  # (*face_extents,)
    induced_metric: np.ndarray  # (*face_extents, n-1, n-1)
    normal_axis: int

    def max_abs_h(self) -> float:
        return float(np.max(np.abs(self.mean_curvature)))


def boundary_geometry(metric: MetricField, face: Face) -> BoundaryGeometry:
    """Boundary data at a face of a collar-orthogonal metric.

    Requires the normal coordinate to be metric-orthogonal to the face
    (g_{0i} = 0 at face nodes); every collar construction in this package
    satisfies that.  A_ij = -1/2 d_r g_ij / sqrt(g_00), r the inward offset.
    """
    chart = metric.chart
    if face not in chart.boundary_faces:
        raise ValueError(f"chart has no boundary face {face}")
    g = metric.values
    idx = face_slice(chart, face)
    tang = tangential_axes(chart, face)
    na = face.axis
    g_face = g[idx]
    mixed = g_face[..., na, tang]
    scale = np.max(np.abs(g_face)) + 1.0
    if np.max(np.abs(mixed)) > 1e-6 * scale:
        raise ValueError(
            f"face {face} is not orthogonal to the normal coordinate; "
            "boundary geometry is defined for collar-orthogonal metrics"
        )
    dg = partial_derivative(g, na, chart, 1, rank=2)[idx]
    sign = 1.0 if face.side == "low" else -1.0
    g00 = g_face[..., na, na]
    a_full = -0.5 * sign * dg / np.sqrt(g00)[..., None, None]
    a = a_full[..., tang, :][..., :, tang]
    induced = g_face[..., tang, :][..., :, tang]
    h = np.einsum("...ij,...ij->...", np.linalg.inv(induced), a)
    return BoundaryGeometry(
        chart=chart,
        face=face,
        second_fundamental=a,
        mean_curvature=h,
        induced_metric=induced,
        normal_axis=na,
    )


def second_form_norm_sq(bg: BoundaryGeometry) -> np.ndarray:
    """|A|^2_g pointwise on the face."""
    ginv = np.linalg.inv(bg.induced_metric)
    return np.einsum(
        "...ik,...jl,...ij,...kl->...", ginv, ginv, bg.second_fundamental, bg.second_fundamental
    )


# ---------------------------------------------------------------------------
# conformal operations


def conformal_exponent(n: int) -> float:
    return 4.0 / (n - 2)


def yamabe_coefficient(n: int) -> float:
    """Coefficient a_n = 4(n-1)/(n-2) of the conformal Laplacian."""
    return 4.0 * (n - 1) / (n - 2)


def conformal_metric(metric: MetricField, u: ScalarField) -> MetricField:
    """u^{4/(n-2)} g."""
    if u.chart != metric.chart:
        raise ValueError("fields live on different charts")
    if np.any(u.values <= 0):
        raise ValueError("conformal factor must be positive")
    n = metric.dim
    factor = u.values ** conformal_exponent(n)
    return MetricField.from_values(metric.chart, metric.values * factor[..., None, None])


def laplace_beltrami(u: ScalarField, metric: MetricField) -> ScalarField:
    """Divergence-form metric Laplacian with the package's shared stencils.

    Diagonal directions use compact half-node fluxes (no spurious
    checkerboard kernel); cross terms difference the node-centered flux.
    """
    if u.chart != metric.chart:
        raise ValueError("fields live on different charts")
    chart = u.chart
    sdet = metric.sqrt_det()
    ginv = metric.inverse()
    div = np.zeros(chart.extents)
    for a in range(chart.dim):
        div += compact_flux_divergence(u.values, sdet * ginv[..., a, a], a, chart)
    du = np.stack(
        [partial_derivative(u.values, a, chart, 1, rank=0) for a in range(chart.dim)],
        axis=-1,
    )
    for a in range(chart.dim):
        for b in range(chart.dim):
            if a == b:
                continue
            flux = sdet * ginv[..., a, b] * du[..., b]
            div += partial_derivative(flux, a, chart, 1, rank=0)
    return ScalarField(chart, div / sdet)


def conformal_scalar_curvature(metric: MetricField, u: ScalarField) -> ScalarField:
    """Scalar curvature of u^{4/(n-2)} g via the conformal Laplacian identity.

    Returns u^{-(n+2)/(n-2)} (-a_n Lap_g u + R_g u), polar-band smoothed on
    sphere caps (matching ``curvature``).
    """
    if np.any(u.values <= 0):
        raise ValueError("conformal factor must be positive")
    chart = metric.chart
    n = metric.dim
    lap = laplace_beltrami(u, metric)
    r_g = curvature(metric).raw_scalar
    val = (-yamabe_coefficient(n) * lap.values + r_g.values * u.values) * u.values ** (
        -(n + 2.0) / (n - 2.0)
    )
    return ScalarField(chart, smooth_polar_bands(val, chart))


# ---------------------------------------------------------------------------
# linearized scalar curvature


def linearized_scalar_curvature(metric: MetricField, h: SymTensorField) -> ScalarField:
    """First variation of scalar curvature at ``metric`` in direction ``h``.

    P_g(h) = -Lap_g(tr_g h) + div div h - <h, Ric_g>_g with covariant
    derivatives of g.
    """
    if h.chart != metric.chart:
        raise ValueError("fields live on different charts")
    chart = metric.chart
    g = metric.values
    ginv = metric.inverse()
    gamma = christoffel_symbols(metric)
    hv = h.values

    tr_h = ScalarField(chart, np.einsum("...ab,...ab->...", ginv, hv))
    lap_tr = laplace_beltrami(tr_h, metric)

    # (nabla h)_{c a b} = d_c h_ab - Gamma^d_{ca} h_db - Gamma^d_{cb} h_ad
    dh = np.stack(
        [partial_derivative(hv, a, chart, 1, rank=2) for a in range(chart.dim)], axis=-3
    )
    nabla_h = (
        dh
        - np.einsum("...dca,...db->...cab", gamma, hv)
        - np.einsum("...dcb,...ad->...cab", gamma, hv)
    )
    # (div h)_b = g^{ca} (nabla h)_{c a b}
    div_h = np.einsum("...ca,...cab->...b", ginv, nabla_h)
    # second divergence of the 1-form: g^{db} (d_d v_b - Gamma^e_{db} v_e)
    dv = np.stack(
        [partial_derivative(div_h, a, chart, 1, rank=1) for a in range(chart.dim)], axis=-2
    )
    nabla_v = dv - np.einsum("...edb,...e->...db", gamma, div_h)
    divdiv = np.einsum("...db,...db->...", ginv, nabla_v)

    ric = curvature(metric).ricci.values
    h_dot_ric = np.einsum("...ac,...bd,...ab,...cd->...", ginv, ginv, hv, ric)
    return ScalarField(chart, -lap_tr.values + divdiv - h_dot_ric)


def comparison_bound_factor(base: MetricField, other: MetricField) -> float:
    """Max over nodes of the largest generalized eigenvalue of (base, other).

    Smallest q with q * other >= base in the quadratic-form order; reported
    alongside linearization remainders, not asserted.
    """
    a = base.values
    b = other.values
    chol = np.linalg.cholesky(b)
    inv_chol = np.linalg.inv(chol)
    m = np.einsum("...ij,...jk,...lk->...il", inv_chol, a, inv_chol)
    eig = np.linalg.eigvalsh(m)
    return float(np.max(eig))


# ---------------------------------------------------------------------------
# Escobar-type solvability conditions


@dataclass(frozen=True)
class EscobarReport:
    dim_at_least_six: bool
    boundary_umbilic: bool
    boundary_weyl_zero: bool
    interior_weyl_nonzero: bool
    in_esc: bool
    umbilic_residual: float
    boundary_weyl_max: float
    interior_weyl_max: float
    weyl_tolerance: float


def escobar_conditions(metric: MetricField) -> EscobarReport:
    """Evaluate the classical solvability conditions for the boundary Yamabe
    problem on this metric's conformal class.

    ``in_esc`` is True when at least one condition fails, i.e. when the class
    lies in the regime where a minimizer is guaranteed.
    """
    chart = metric.chart
    n = chart.dim
    bundle = curvature(metric)
    weyl = bundle.weyl_norm.values
    h2 = max(ax.spacing for ax in chart.axes) ** 2
    weyl_scale = float(np.max(np.abs(bundle.scalar.values))) + 1.0
    tol = 10.0 * h2 * weyl_scale

    umb_res = 0.0
    for face in chart.boundary_faces:
        bg = boundary_geometry(metric, face)
        trace_part = bg.mean_curvature[..., None, None] * bg.induced_metric / (n - 1)
        dev = np.max(np.abs(bg.second_fundamental - trace_part))
        umb_res = max(umb_res, float(dev))
    a_scale = max(
        float(np.max(np.abs(boundary_geometry(metric, f).second_fundamental)))
        for f in chart.boundary_faces
    )
    umbilic = umb_res <= 1e-6 * (1.0 + a_scale)

    boundary_weyl = 0.0
    for face in chart.boundary_faces:
        boundary_weyl = max(boundary_weyl, float(np.max(weyl[face_slice(chart, face)])))
    interior_weyl = float(np.max(weyl))

    cond_a = n >= 6
    cond_b = umbilic
    cond_c = boundary_weyl <= tol
    cond_d = interior_weyl > tol
    return EscobarReport(
        dim_at_least_six=cond_a,
        boundary_umbilic=cond_b,
        boundary_weyl_zero=cond_c,
        interior_weyl_nonzero=cond_d,
        in_esc=not (cond_a and cond_b and cond_c and cond_d),
        umbilic_residual=umb_res,
        boundary_weyl_max=boundary_weyl,
        interior_weyl_max=interior_weyl,
        weyl_tolerance=tol,
    )


# ---------------------------------------------------------------------------
# first-variation identity check


@dataclass(frozen=True)
class VariationReport:
    lhs: float
    rhs: float
    residual: float
    interior_term: float
    boundary_term: float
    conformal_restriction_residual: float

    def relative_residual(self) -> float:
        return self.residual / max(abs(self.lhs), 1.0)


def variational_identity_check(
    metric_path: Callable[[float], MetricField], t_step: float = 1e-4
) -> VariationReport:
    """Check the first variation of the total-curvature functional.

    d/dt of the curvature integral is compared against the assembled
    right-hand side: minus the Einstein-tensor pairing with the variation in
    the interior, minus the boundary integral of (2 H' + f H), where the
    boundary restriction of the variation must be conformal (h_ij = f g_ij on
    each face; checked).  H' is computed by the same central t-difference as
    the left side so neither side reuses the other's intermediate steps.
    """
    if t_step <= 0:
        raise ValueError("t_step must be positive")
    g0 = metric_path(0.0)
    chart = g0.chart
    gp = metric_path(t_step)
    gm = metric_path(-t_step)
    h = (gp.values - gm.values) / (2 * t_step)

    def total_curvature(m: MetricField) -> float:
        r = curvature(m).scalar
        return integrate(r, m)

    lhs = (total_curvature(gp) - total_curvature(gm)) / (2 * t_step)

    bundle = curvature(g0)
    ginv = g0.inverse()
    einstein = bundle.ricci.values - 0.5 * bundle.raw_scalar.values[..., None, None] * g0.values
    pairing = np.einsum("...ac,...bd,...ab,...cd->...", ginv, ginv, einstein, h)
    interior = -integrate(ScalarField(chart, smooth_polar_bands(pairing, chart)), g0)

    boundary = 0.0
    conf_res = 0.0
    for face in chart.boundary_faces:
        idx = face_slice(chart, face)
        tang = tangential_axes(chart, face)
        g_face = g0.values[idx][..., tang, :][..., :, tang]
        h_face = h[idx][..., tang, :][..., :, tang]
        ginv_face = np.linalg.inv(g_face)
        f = np.einsum("...ij,...ij->...", ginv_face, h_face) / (chart.dim - 1)
        dev = h_face - f[..., None, None] * g_face
        scale = float(np.max(np.abs(h))) + 1e-30
        res = float(np.max(np.abs(dev))) / scale
        conf_res = max(conf_res, res)
        if res > 1e-6:
            raise ValueError(
                f"variation restricted to face {face} is not conformal "
                f"(relative deviation {res:.2e}); the identity requires a "
                "fixed boundary conformal class"
            )
        h_mean = boundary_geometry(g0, face).mean_curvature
        hp = boundary_geometry(gp, face).mean_curvature
        hm = boundary_geometry(gm, face).mean_curvature
        h_prime = (hp - hm) / (2 * t_step)
        integrand = 2.0 * h_prime + f * h_mean
        w = np.ones(integrand.shape)
        for k, a in enumerate(tang):
            shape = [1] * (chart.dim - 1)
            shape[k] = chart.extents[a]
            w = w * chart.axis_weights(a).reshape(shape)
        area = np.sqrt(np.linalg.det(g_face))
        boundary += float(np.sum(integrand * area * w))

    rhs = interior - boundary
    return VariationReport(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        interior_term=interior,
        boundary_term=-boundary,
        conformal_restriction_residual=conf_res,
    )
