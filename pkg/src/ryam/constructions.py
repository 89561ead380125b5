"""Explicit metric families: radial cutoffs, collar normal forms, blended and
boundary-flattened approximation families, gluing along a matched boundary,
doubling, and conformal line segments.

The central construction takes a metric with minimal boundary (H = 0) and
produces a family g~_delta that is conformally a product near the face,
untouched past depth delta, still minimal, and whose scalar curvature stays
uniformly close to the input's.  It follows the collar normal form
(1 + r^2 phi/2)^{4/(n-2)} ((g - 2rA) + dr^2) of the input's boundary data:
inside the collar the second fundamental form is rotated away at rate
1 - w(r) and the conformal exponent picks up the compensating term
-(3(n-2)/(4(n-1))) (2 - w) w |A|^2, while the deviation of the input from
its own normal form (an O(r^2) tensor) is blended back in with weight 1 - w.
A nodal switch between the formula and the input at r = delta would be
discontinuous for inputs not globally in normal form, so the blended form is
used instead; it reproduces the plain formula exactly whenever the input is
its own normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .geometry import (
    boundary_geometry,
    conformal_exponent,
    conformal_scalar_curvature,
    curvature,
    second_form_norm_sq,
)
from .grid import (
    Axis,
    ChartKind,
    Face,
    GridChart,
    MetricField,
    PositivityError,
    ScalarField,
    face_slice,
    tangential_axes,
)

_PRODUCT_TOL = 1e-6
_H_TOL = 1e-6


# ---------------------------------------------------------------------------
# radial cutoff


def _smootherstep(x: np.ndarray) -> np.ndarray:
    t = np.clip(x, 0.0, 1.0)
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)


def _smootherstep_d1(x: np.ndarray) -> np.ndarray:
    t = np.clip(x, 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2


def _smootherstep_d2(x: np.ndarray) -> np.ndarray:
    t = np.clip(x, 0.0, 1.0)
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


@dataclass(frozen=True)
class CutoffFunction:
    """Smooth radial step: 1 on [0, plateau], 0 on [delta, inf).

    ``eps`` stores the classical plateau radius exp(-1/delta)/4 associated
    with this delta.  The actual plateau extends to delta/4, which is wider
    (the classical radius is unreachably small for any grid).  The profile is
    a C^2 smootherstep in log(t); the classical derivative bounds
    |t w'| < delta and |t w''| < delta are *not* achievable together with
    this eps formula (see the measured suprema), so they are reported, not
    certified.
    """

    delta: float
    eps: float
    plateau: float
    sup_t_wdot: float = field(default=float("nan"), compare=False)
    sup_t_wddot: float = field(default=float("nan"), compare=False)
    sup_t2_wddot: float = field(default=float("nan"), compare=False)

    @property
    def log_width(self) -> float:
        return math.log(self.delta / self.plateau)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            xi = np.where(t > 0, np.log(self.delta / np.maximum(t, 1e-300)), np.inf)
        return np.where(t <= self.plateau, 1.0, np.where(t >= self.delta, 0.0, _smootherstep(xi / self.log_width)))

    def eval_d1(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > self.plateau) & (t < self.delta)
        xi = np.zeros_like(t)
        np.log(np.divide(self.delta, t, where=inside, out=np.ones_like(t)), where=inside, out=xi)
        d = -_smootherstep_d1(xi / self.log_width) / (self.log_width * np.where(inside, t, 1.0))
        return np.where(inside, d, 0.0)

    def eval_d2(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > self.plateau) & (t < self.delta)
        xi = np.zeros_like(t)
        np.log(np.divide(self.delta, t, where=inside, out=np.ones_like(t)), where=inside, out=xi)
        x = xi / self.log_width
        tt = np.where(inside, t, 1.0)
        d = (_smootherstep_d2(x) / self.log_width**2 + _smootherstep_d1(x) / self.log_width) / (
            tt * tt
        )
        return np.where(inside, d, 0.0)

    def paper_bounds_hold(self) -> tuple[bool, bool]:
        return (self.sup_t_wdot < self.delta, self.sup_t_wddot < self.delta)


def kobayashi_cutoff(
    delta: float, plateau_floor: float = 0.0, n_check: int = 10_000
) -> CutoffFunction:
    """Radial cutoff with unit plateau near zero and support in [0, delta].

    The plateau is max(eps(delta), delta^2/2, plateau_floor), capped at
    delta/2: at least the classical radius eps(delta) = exp(-1/delta)/4, but
    never exponentially small, so the log-space transition length grows as
    delta shrinks while the plateau stays resolvable on reasonable grids.
    Constructions pass a grid-aware ``plateau_floor`` so their stencils at
    the face see a genuine plateau.  The derivative suprema are measured on a
    log-spaced sample of ``n_check`` points and stored on the result.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    eps = 0.25 * math.exp(-1.0 / delta)
    plateau = min(max(eps, delta * delta / 2.0, plateau_floor), delta / 2.0)
    cut = CutoffFunction(delta=delta, eps=eps, plateau=plateau)
    t = np.geomspace(eps / 10.0, 2.0 * delta, n_check)
    w1 = cut.eval_d1(t)
    w2 = cut.eval_d2(t)
    return CutoffFunction(
        delta=delta,
        eps=eps,
        plateau=plateau,
        sup_t_wdot=float(np.max(np.abs(t * w1))),
        sup_t_wddot=float(np.max(np.abs(t * w2))),
        sup_t2_wddot=float(np.max(np.abs(t * t * w2))),
    )


# ---------------------------------------------------------------------------
# collar data and normal form


@dataclass(frozen=True)
class CollarAssembly:
    """Boundary data driving a collar construction."""

    base_boundary_metric: np.ndarray  # (*face_extents, n-1, n-1)
    second_form: np.ndarray  # (*face_extents, n-1, n-1)
    collar_length: float
    blend: CutoffFunction

    def __post_init__(self):
        if self.collar_length < self.blend.delta:
            raise ValueError("collar length shorter than the blend support")


def _embed_fiber_tensor(chart: GridChart, face: Face, fiber_tensor: np.ndarray) -> np.ndarray:
    """Broadcast a (n-1)x(n-1) face tensor to a full nxn chart tensor field."""
    n = chart.dim
    tang = tangential_axes(chart, face)
    shape = list(chart.extents) + [n, n]
    out = np.zeros(shape)
    expand = list(fiber_tensor.shape[:-2])
    expand.insert(face.axis, 1)
    ft = fiber_tensor.reshape(expand + [n - 1, n - 1])
    for i, ai in enumerate(tang):
        for j, aj in enumerate(tang):
            out[..., ai, aj] = ft[..., i, j]
    return out


def collar_metric(
    boundary_metric: np.ndarray,
    second_form: np.ndarray,
    chart: GridChart,
    face: Face | None = None,
) -> MetricField:
    """(g - 2 r A) + dr^2 extruded from boundary data along the collar.

    Raises PositivityError naming the first offending collar depth when
    g - 2rA degenerates.
    """
    face = chart.face() if face is None else face
    r = chart.collar_distance(face)
    g_t = _embed_fiber_tensor(chart, face, boundary_metric)
    a_t = _embed_fiber_tensor(chart, face, second_form)
    vals = g_t - 2.0 * r[..., None, None] * a_t
    vals[..., face.axis, face.axis] = 1.0
    tang = tangential_axes(chart, face)
    fiber_block = vals[..., tang, :][..., :, tang]
    eigs = np.linalg.eigvalsh(fiber_block)
    bad = eigs[..., 0] <= 0.0
    if bad.any():
        r_bad = np.broadcast_to(r, chart.extents)[bad]
        raise PositivityError(
            f"g - 2rA loses positivity at collar depth r = {float(r_bad.min()):.6g}"
        )
    return MetricField.from_values(chart, vals)


def fiber_chart(chart: GridChart, face: Face) -> GridChart:
    """Internal (n-1)-dimensional chart of a boundary fiber.

    Bypasses the dim >= 3 builder validation: fiber charts only feed the
    curvature engine for induced-metric computations.
    """
    tang = tangential_axes(chart, face)
    axes = tuple(chart.axes[a] for a in tang)
    return GridChart(
        kind=ChartKind.TORUS_BLOCK,
        dim=len(axes),
        axes=axes,
        boundary_faces=(),
        normal_axis=-1,
    )


def induced_scalar_curvature(metric: MetricField, face: Face) -> np.ndarray:
    """Scalar curvature of the induced boundary metric, per face node."""
    chart = metric.chart
    fc = fiber_chart(chart, face)
    bg = boundary_geometry(metric, face)
    fiber_metric = MetricField.from_values(fc, bg.induced_metric)
    return curvature(fiber_metric).raw_scalar.values


def phi_field(metric: MetricField, face: Face) -> np.ndarray:
    """Quadratic conformal-correction coefficient of the collar normal form.

    phi = -((n-2)/(4(n-1))) (R|_face - (R_boundary + 3|A|^2 - H^2)); the
    normal form (1 + r^2 phi / 2)^{4/(n-2)} ((g - 2rA) + dr^2) then matches
    the metric's scalar curvature on the face.
    """
    chart = metric.chart
    n = chart.dim
    bundle = curvature(metric)
    r_face = bundle.scalar.values[face_slice(chart, face)]
    bg = boundary_geometry(metric, face)
    r_bdry = induced_scalar_curvature(metric, face)
    a2 = second_form_norm_sq(bg)
    h = bg.mean_curvature
    return -(n - 2.0) / (4.0 * (n - 1.0)) * (r_face - (r_bdry + 3.0 * a2 - h * h))


# ---------------------------------------------------------------------------
# blending


def blend_metrics(
    base: MetricField,
    target: MetricField,
    w: CutoffFunction,
    face: Face | None = None,
    check_agreement: bool = True,
) -> MetricField:
    """base + w(r) (target - base) along the collar of ``face``.

    The curvature of the blend stays close to the base's only when target and
    base agree to first order at the face (values and first normal
    derivative, with O(r^2) difference decay); this is checked on the nodal
    values unless disabled.
    """
    chart = base.chart
    if target.chart != chart:
        raise ValueError("fields live on different charts")
    face = chart.face() if face is None else face
    diff = target.values - base.values
    if check_agreement:
        r = np.broadcast_to(chart.collar_distance(face), chart.extents)
        scale = float(np.max(np.abs(base.values))) + 1.0
        d0 = np.max(np.abs(diff[face_slice(chart, face)]))
        if d0 > 1e-8 * scale:
            raise ValueError(f"blend targets disagree on the face (|diff| = {d0:.2e})")
        h = chart.axes[face.axis].spacing
        layer = np.abs(diff[_layer_slice(chart, face, 1)]).max()
        if layer > 10.0 * h * h * scale + 1e-8 * scale:
            raise ValueError(
                "blend targets do not agree to first order at the face "
                f"(first-layer difference {layer:.2e} exceeds the O(r^2) bound)"
            )
    rr = chart.collar_distance(face)
    wv = w.eval(rr)[..., None, None]
    return MetricField.from_values(chart, base.values + wv * diff)


def _layer_slice(chart: GridChart, face: Face, k: int) -> tuple:
    idx = [slice(None)] * chart.dim
    idx[face.axis] = k if face.side == "low" else -(k + 1)
    return tuple(idx)


# ---------------------------------------------------------------------------
# boundary-flattening approximation family


def _normal_form_values(
    chart: GridChart,
    face: Face,
    g_ind: np.ndarray,
    a_ind: np.ndarray,
    phi: np.ndarray,
    w_of_r: np.ndarray | None,
    a2: np.ndarray,
) -> np.ndarray:
    """(1 + r^2 phi_delta/2)^{4/(n-2)} ((g - 2r(1-w)A) + dr^2) nodal values.

    With w_of_r None this is the plain normal form (w = 0 everywhere in the
    A-term and phi_delta = phi).
    """
    n = chart.dim
    r = chart.collar_distance(face)
    g_t = _embed_fiber_tensor(chart, face, g_ind)
    a_t = _embed_fiber_tensor(chart, face, a_ind)
    phi_full = _embed_fiber_scalar(chart, face, phi)
    if w_of_r is None:
        shrink = np.ones(chart.extents)
        phi_delta = phi_full
    else:
        shrink = 1.0 - w_of_r
        a2_full = _embed_fiber_scalar(chart, face, a2)
        phi_delta = phi_full - (3.0 * (n - 2.0) / (4.0 * (n - 1.0))) * (
            2.0 - w_of_r
        ) * w_of_r * a2_full
    rb = np.broadcast_to(r, chart.extents)
    vals = g_t - 2.0 * (rb * shrink)[..., None, None] * a_t
    vals[..., face.axis, face.axis] = 1.0
    factor = 1.0 + 0.5 * rb * rb * phi_delta
    if np.any(factor <= 0.0):
        raise PositivityError("conformal factor 1 + r^2 phi/2 lost positivity")
    return vals * (factor ** conformal_exponent(n))[..., None, None]


def _embed_fiber_scalar(chart: GridChart, face: Face, fiber_values: np.ndarray) -> np.ndarray:
    expand = list(np.shape(fiber_values))
    expand.insert(face.axis, 1)
    return np.broadcast_to(np.reshape(fiber_values, expand), chart.extents)


def _check_collar_orthogonal(metric: MetricField, face: Face):
    """The collar coordinate must be unit-speed and orthogonal at the face
    (first order), and metric-orthogonal throughout; the construction's
    blended correction absorbs any O(r^2) drift of g_rr away from 1."""
    chart = metric.chart
    na = face.axis
    g = metric.values
    scale = float(np.max(np.abs(g))) + 1.0
    tang = tangential_axes(chart, face)
    if np.max(np.abs(g[..., na, tang])) > 1e-6 * scale:
        raise ValueError("approximation family needs g_ri = 0 collar coordinates")
    face_rr = g[face_slice(chart, face)][..., na, na]
    layer_rr = g[_layer_slice(chart, face, 1)][..., na, na]
    h = chart.axes[face.axis].spacing
    if np.max(np.abs(face_rr - 1.0)) > 1e-8 * scale or np.max(
        np.abs(layer_rr - 1.0)
    ) > 10.0 * h * h * scale + 1e-8 * scale:
        raise ValueError(
            "approximation family needs a unit-speed collar coordinate at the "
            "face (g_rr = 1 + O(r^2))"
        )


def approximation_family(
    metric: MetricField,
    delta: float,
    face: Face | None = None,
    cutoff: CutoffFunction | None = None,
    plateau_floor: float | None = None,
) -> MetricField:
    """Boundary-flattening family member at parameter ``delta``.

    Requires the minimal boundary condition H = 0 on the face.  The output
    is conformally a product (g + dr^2) where the cutoff plateau holds,
    coincides with the input at nodes past depth delta, and has exactly
    vanishing second fundamental form on the face (hence H = 0).
    """
    chart = metric.chart
    face = chart.face() if face is None else face
    length = float(np.max(chart.collar_distance(face)))
    if not 0.0 < delta < length:
        raise ValueError(f"delta must lie in (0, collar length {length:.3g})")
    _check_collar_orthogonal(metric, face)
    bg = boundary_geometry(metric, face)
    h_max = bg.max_abs_h()
    a_scale = float(np.max(np.abs(bg.second_fundamental)))
    if h_max > _H_TOL * (1.0 + a_scale):
        flat = np.unravel_index(np.argmax(np.abs(bg.mean_curvature)), bg.mean_curvature.shape)
        raise ValueError(
            f"minimal boundary condition fails: |H| = {h_max:.3e} at face node {flat}"
        )
    if cutoff is None:
        if plateau_floor is None:
            # keep the face stencil rows inside the plateau
            plateau_floor = 2.5 * chart.axes[face.axis].spacing
        cutoff = kobayashi_cutoff(delta, plateau_floor=plateau_floor)
    w = cutoff
    g_ind = bg.induced_metric
    a_ind = bg.second_fundamental
    a2 = second_form_norm_sq(bg)
    phi = phi_field(metric, face)

    r = np.broadcast_to(chart.collar_distance(face), chart.extents)
    w_of_r = w.eval(r)
    pf = _normal_form_values(chart, face, g_ind, a_ind, phi, w_of_r, a2)
    nf = _normal_form_values(chart, face, g_ind, a_ind, phi, None, a2)
    vals = pf + (1.0 - w_of_r)[..., None, None] * (metric.values - nf)
    return MetricField.from_values(chart, vals)


# ---------------------------------------------------------------------------
# conformal-product collar checks


def conformal_product_deviation(
    metric: MetricField, face: Face, layers: int = 3
) -> tuple[float, np.ndarray]:
    """How far the innermost collar layers are from u^{4/(n-2)} (h + dr^2).

    Returns (relative deviation, the face factor field u on the fiber grid).
    The factor at each layer is read off the normal-normal component; the
    tangential block divided by it must then be r-independent and the mixed
    components zero.
    """
    chart = metric.chart
    g = metric.values
    na = face.axis
    tang = tangential_axes(chart, face)
    n = chart.dim
    scale = float(np.max(np.abs(g))) + 1.0
    dev = 0.0
    base = None
    for k in range(layers):
        sl = _layer_slice(chart, face, k)
        layer = g[sl]
        factor = layer[..., na, na]
        if np.any(factor <= 0):
            return float("inf"), np.ones_like(factor)
        dev = max(dev, float(np.max(np.abs(layer[..., na, tang]))) / scale)
        reduced = layer[..., tang, :][..., :, tang] / factor[..., None, None]
        if base is None:
            base = reduced
        else:
            dev = max(dev, float(np.max(np.abs(reduced - base))) / scale)
    u_face = g[face_slice(chart, face)][..., na, na] ** (1.0 / conformal_exponent(n))
    return dev, u_face


def require_conformal_product_collar(metric: MetricField, face: Face, layers: int = 3):
    dev, _ = conformal_product_deviation(metric, face, layers)
    if dev > _PRODUCT_TOL:
        raise ValueError(
            f"metric is not conformally product near face {face} "
            f"(relative deviation {dev:.3e} on the innermost {layers} layers)"
        )


# ---------------------------------------------------------------------------
# gluing


@dataclass(frozen=True)
class GluedManifold:
    """Glued metric with its region decomposition along the collar axis."""

    metric: MetricField
    regions: dict
    ell: float
    delta: float
    seam_indices: tuple[int, int]

    @property
    def chart(self) -> GridChart:
        return self.metric.chart


def _mirror_values(values: np.ndarray, axis: int, dim: int) -> np.ndarray:
    """Reverse the collar axis; the orientation flip negates mixed components."""
    flipped = np.flip(values, axis=axis)
    out = flipped.copy()
    for i in range(dim):
        if i != axis:
            out[..., axis, i] *= -1.0
            out[..., i, axis] *= -1.0
    return out


def glue_metrics(
    piece1: tuple[MetricField, Face],
    piece2: tuple[MetricField, Face],
    fiber_metric: np.ndarray,
    f1: np.ndarray,
    f2: np.ndarray,
    ell: float,
    delta: float,
    cutoff: CutoffFunction | None = None,
) -> GluedManifold:
    """Join two pieces through a bridge fiber x [0, ell].

    Both pieces must restrict to ``fiber_metric`` on their matched faces and
    be conformally product (1 + r^2 f_j/2)^{4/(n-2)} (h + dr^2) near them.
    The bridge metric interpolates: factor (1 + r^2 w(r) f_1/2) on [0, delta],
    a plain product on [delta, ell - delta], and the mirrored f_2 factor on
    [ell - delta, ell].  ``ell`` snaps to a whole number of grid cells.
    """
    m1, face1 = piece1
    m2, face2 = piece2
    ch1, ch2 = m1.chart, m2.chart
    n = ch1.dim
    if ch2.dim != n:
        raise ValueError("pieces have different dimensions")
    if delta >= ell / 2.0:
        raise ValueError("delta must be smaller than ell/2")
    tang1 = tangential_axes(ch1, face1)
    tang2 = tangential_axes(ch2, face2)
    fib_ax1 = tuple(ch1.axes[a] for a in tang1)
    fib_ax2 = tuple(ch2.axes[a] for a in tang2)
    if fib_ax1 != fib_ax2:
        raise ValueError("pieces have incompatible fiber grids")
    h1 = ch1.axes[face1.axis].spacing
    h2 = ch2.axes[face2.axis].spacing
    if abs(h1 - h2) > 1e-12:
        raise ValueError("pieces have different collar spacings")
    for m, face in ((m1, face1), (m2, face2)):
        ind = boundary_geometry(m, face).induced_metric
        scale = float(np.max(np.abs(fiber_metric))) + 1.0
        if np.max(np.abs(ind - fiber_metric)) > 1e-8 * scale:
            raise ValueError(f"piece face {face} does not restrict to the bridge fiber metric")
        require_conformal_product_collar(m, face)

    w = kobayashi_cutoff(delta, plateau_floor=2.5 * h1) if cutoff is None else cutoff
    n_cells = max(2, round(ell / h1))
    ell_eff = n_cells * h1
    n1 = ch1.extents[face1.axis]
    n2 = ch2.extents[face2.axis]
    total = n1 + n_cells + n2 - 1

    axes = fib_ax1 + (Axis(total, h1, periodic=False),)
    na = len(axes) - 1
    chart = GridChart(
        kind=ChartKind.CYLINDER,
        dim=n,
        axes=axes,
        boundary_faces=(Face(na, "low"), Face(na, "high")),
        normal_axis=na,
    )

    # piece values in bridge axis order (fiber..., collar), matched face at
    # the low end of the collar axis
    def reorder(m: MetricField, face: Face, tang) -> np.ndarray:
        order = list(tang) + [face.axis]
        v = np.moveaxis(m.values, order, range(n))
        idx = np.array(order)
        v = v[..., idx, :][..., :, idx]
        if face.side == "high":
            v = _mirror_values(v, na, n)
        return v

    v1 = reorder(m1, face1, tang1)
    v2 = reorder(m2, face2, tang2)
    # piece 1 enters reversed so its matched face sits at the bridge start
    v1 = _mirror_values(v1, na, n)

    vals = np.zeros(chart.extents + (n, n))
    vals[..., :n1, :, :] = v1
    vals[..., n1 - 1 + n_cells :, :, :] = v2

    # bridge region, local coordinate r in [0, ell_eff]; the two end factors
    # have disjoint supports (delta < ell/2), so their product matches the
    # piecewise three-part definition exactly
    rb = np.arange(n_cells + 1) * h1
    fib_shape = tuple(ax.count for ax in fib_ax1)
    prod = np.zeros(fib_shape + (n, n))
    for i in range(n - 1):
        for j in range(n - 1):
            prod[..., i, j] = fiber_metric[..., i, j]
    prod[..., na, na] = 1.0
    exp = conformal_exponent(n)
    f1b = np.asarray(f1, dtype=float)[..., None]
    f2b = np.asarray(f2, dtype=float)[..., None]
    full_factor = (1.0 + 0.5 * rb**2 * w.eval(rb) * f1b) * (
        1.0 + 0.5 * (ell_eff - rb) ** 2 * w.eval(ell_eff - rb) * f2b
    )
    if np.any(full_factor <= 0):
        raise PositivityError("bridge conformal factor lost positivity")
    bridge = prod[..., None, :, :] * (full_factor**exp)[..., None, None]
    vals[..., n1 - 1 : n1 + n_cells, :, :] = bridge

    metric = MetricField.from_values(chart, vals)
    regions = {
        "piece1": (0, n1 - 1),
        "bridge": (n1 - 1, n1 - 1 + n_cells),
        "bridge_blend1": (n1 - 1, n1 - 1 + int(round(delta / h1))),
        "bridge_product": (
            n1 - 1 + int(round(delta / h1)),
            n1 - 1 + n_cells - int(round(delta / h1)),
        ),
        "bridge_blend2": (n1 - 1 + n_cells - int(round(delta / h1)), n1 - 1 + n_cells),
        "piece2": (n1 - 1 + n_cells, total - 1),
    }
    return GluedManifold(
        metric=metric,
        regions=regions,
        ell=ell_eff,
        delta=delta,
        seam_indices=(n1 - 1, n1 - 1 + n_cells),
    )


def region_chart_metric(glued: GluedManifold, region: str) -> MetricField:
    """Restrict a glued metric to one region as its own chart."""
    k0, k1 = glued.regions[region]
    chart = glued.chart
    na = chart.normal_axis
    count = k1 - k0 + 1
    axes = chart.axes[:na] + (Axis(count, chart.axes[na].spacing, periodic=False),)
    sub = GridChart(
        kind=chart.kind,
        dim=chart.dim,
        axes=axes,
        boundary_faces=(Face(na, "low"), Face(na, "high")),
        normal_axis=na,
    )
    sl = [slice(None)] * chart.dim
    sl[na] = slice(k0, k1 + 1)
    return MetricField.from_values(sub, glued.metric.values[tuple(sl)])


# ---------------------------------------------------------------------------
# doubling


def double_manifold(metric: MetricField, face: Face) -> MetricField:
    """Mirror a piece across a conformally-product face.

    The collar factor's even profile makes the double smooth; the input must
    pass the conformal-product check on the innermost layers.  ``face`` must
    lie on a fiber x interval chart.
    """
    chart = metric.chart
    if chart.kind is ChartKind.SPHERE_CAP:
        raise ValueError("doubling a cap would close the manifold; not representable")
    require_conformal_product_collar(metric, face)
    na = face.axis
    count = chart.extents[na]
    axes = list(chart.axes)
    axes[na] = Axis(2 * count - 1, chart.axes[na].spacing, periodic=False)
    doubled = GridChart(
        kind=chart.kind,
        dim=chart.dim,
        axes=tuple(axes),
        boundary_faces=(Face(na, "low"), Face(na, "high")),
        normal_axis=na,
        radius=chart.radius,
    )
    mirrored = _mirror_values(metric.values, na, chart.dim)
    sl_lo = [slice(None)] * chart.dim
    sl_hi = [slice(None)] * chart.dim
    vals = np.zeros(doubled.extents + (chart.dim, chart.dim))
    if face.side == "low":
        # mirrored copy first, original second, seam at index count-1
        sl_lo[na] = slice(0, count)
        sl_hi[na] = slice(count - 1, None)
        vals[tuple(sl_lo)] = mirrored
        vals[tuple(sl_hi)] = metric.values
    else:
        sl_lo[na] = slice(0, count)
        sl_hi[na] = slice(count - 1, None)
        vals[tuple(sl_lo)] = metric.values
        vals[tuple(sl_hi)] = mirrored
    return MetricField.from_values(doubled, vals)


# ---------------------------------------------------------------------------
# conformal line segments


@dataclass(frozen=True)
class PscPathReport:
    t: float
    min_scalar_curvature: float
    max_scalar_curvature: float


def psc_linear_path(
    g0: MetricField, u: ScalarField, t: float
) -> tuple[MetricField, PscPathReport]:
    """Metric at parameter t of the segment (t u + (1-t))^{4/(n-2)} g0.

    The report carries the nodal extremes of the scalar curvature; when both
    segment endpoints have positive curvature in this class, every sampled t
    should report a positive minimum.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if np.any(u.values <= 0):
        raise ValueError("conformal factor must be positive")
    ut = ScalarField(u.chart, t * u.values + (1.0 - t))
    metric = MetricField.from_values(
        g0.chart, g0.values * (ut.values ** conformal_exponent(g0.dim))[..., None, None]
    )
    r = conformal_scalar_curvature(g0, ut)
    return metric, PscPathReport(
        t=t,
        min_scalar_curvature=float(np.min(r.values)),
        max_scalar_curvature=float(np.max(r.values)),
    )
