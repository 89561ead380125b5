"""Model metrics and scalar-factor vocabulary used by the CLI and tests.

All builders are pure functions of their parameters (plus an optional seed),
so identical descriptors produce bit-identical fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .grid import ChartKind, Face, GridChart, MetricField, ScalarField


def flat_metric(chart: GridChart) -> MetricField:
    """Identity metric in chart coordinates."""
    n = chart.dim
    vals = np.zeros(chart.extents + (n, n))
    vals[...] = np.eye(n)
    return MetricField.from_values(chart, vals)


def round_cap_metric(chart: GridChart, radius: float | None = None) -> MetricField:
    """Round-sphere metric on a SPHERE_CAP chart (dim 3 or 4)."""
    if chart.kind is not ChartKind.SPHERE_CAP:
        raise ValueError("round_cap_metric needs a sphere-cap chart")
    rho = chart.radius if radius is None else radius
    coords = chart.coordinate_grids()
    n = chart.dim
    vals = np.zeros(chart.extents + (n, n))
    th1 = coords[0]
    if n == 3:
        th2 = coords[1]
        vals[..., 0, 0] = 1.0
        vals[..., 1, 1] = np.sin(th1) ** 2
        vals[..., 2, 2] = np.sin(th1) ** 2 * np.sin(th2) ** 2
    else:
        eta = coords[1]
        vals[..., 0, 0] = 1.0
        vals[..., 1, 1] = np.sin(th1) ** 2
        vals[..., 2, 2] = np.sin(th1) ** 2 * np.sin(eta) ** 2
        vals[..., 3, 3] = np.sin(th1) ** 2 * np.cos(eta) ** 2
    vals = vals * rho**2
    # broadcast fills only diag; expand explicitly
    full = np.zeros(chart.extents + (n, n))
    full += vals
    return MetricField.from_values(chart, full)


def round_sphere_fiber_metric(chart: GridChart, radius: float = 1.0) -> np.ndarray:
    """(n-1)-metric of a round S^2 fiber on a sphere-fiber cylinder, per fiber node."""
    if chart.kind is not ChartKind.CYLINDER or chart.dim != 3:
        raise ValueError("sphere fiber metrics live on dim-3 cylinder charts")
    th = chart.axis_coordinates(0)
    fshape = (chart.extents[0], chart.extents[1])
    g = np.zeros(fshape + (2, 2))
    g[..., 0, 0] = radius**2
    g[..., 1, 1] = (radius * np.sin(th)[:, None]) ** 2
    return g


def twisted_block_metric(chart: GridChart, tau: float = math.sqrt(2.0)) -> MetricField:
    """Shear block dx^2 + (dy + tau*r dx)^2 + dr^2 on a torus block.

    Scalar curvature is the constant -tau^2/2 and every r-slice has zero mean
    curvature (the fiber determinant is identically 1).
    """
    if chart.dim != 3 or chart.normal_axis != 2:
        raise ValueError("twisted block needs a dim-3 torus block with collar last")
    r = chart.axis_coordinates(2).reshape(1, 1, -1)
    vals = np.zeros(chart.extents + (3, 3))
    vals[..., 0, 0] = 1.0 + (tau * r) ** 2
    vals[..., 0, 1] = tau * r
    vals[..., 1, 1] = 1.0
    vals[..., 2, 2] = 1.0
    return MetricField.from_values(chart, vals)


def twisted_slice_scalar_curvature(tau: float, r: np.ndarray) -> np.ndarray:
    """Closed-form scalar curvature of (g - 2rA) + dr^2 for the twist data.

    Reference oracle for collar metrics built from the twisted block's
    boundary data g = id, A = -(tau/2) offdiag.
    """
    t2r2 = (tau * r) ** 2
    return tau**2 * (1.5 + t2r2 / 2.0) / (1.0 - t2r2) ** 2


# ---------------------------------------------------------------------------
# constant-negative-curvature block with a product collar


@dataclass(frozen=True)
class ShearProfile:
    """1D data (u, u', s) of the constant-curvature shear block."""

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    s: np.ndarray
    amplitude: float


def _bump(x, a, b):
    """C^2 smoothstep from 0 at a to 1 at b."""
    t = np.clip((x - a) / (b - a), 0.0, 1.0)
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)


def _shear_rhs(r, y, amp, length):
    u, du, s = y
    S = amp * (_bump(r, 0.15 * length, 0.45 * length) - _bump(r, 0.55 * length, 0.85 * length))
    upp = u**5 * (1.0 - S * S) / 8.0
    ds = math.sqrt(2.0) * u * u * S
    return [du, upp, ds]


def solve_shear_profile(length: float = 1.0) -> ShearProfile:
    """Shoot the shear amplitude so the conformal factor has du/dr = 0 at r = L.

    The block  u(r)^4 * (dx^2 + (dy + s(r) dx)^2 + dr^2)  then has scalar
    curvature exactly -1, zero mean curvature at both ends, and a genuinely
    conformally-product collar near r = 0 where the shear vanishes.
    """

    def final_slope(amp: float) -> float:
        sol = solve_ivp(
            _shear_rhs,
            (0.0, length),
            [1.0, 0.0, 0.0],
            args=(amp, length),
            rtol=1e-12,
            atol=1e-14,
            dense_output=False,
            max_step=length / 50.0,
        )
        return sol.y[1, -1]

    amp = brentq(final_slope, 1.0, 4.0, xtol=1e-13, rtol=1e-15)
    return ShearProfile(r=np.array([]), u=np.array([]), du=np.array([]), s=np.array([]), amplitude=amp)


def shear_profile_on(r_nodes: np.ndarray, length: float, amplitude: float) -> ShearProfile:
    sol = solve_ivp(
        _shear_rhs,
        (0.0, length),
        [1.0, 0.0, 0.0],
        args=(amplitude, length),
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
        max_step=length / 50.0,
    )
    y = sol.sol(r_nodes)
    return ShearProfile(r=r_nodes, u=y[0], du=y[1], s=y[2], amplitude=amplitude)


_SHEAR_AMP_CACHE: dict[float, float] = {}


def constant_curvature_block(chart: GridChart, target: float = -1.0) -> MetricField:
    """Block with scalar curvature identically ``target`` (< 0) and H = 0 ends.

    Built as u(r)^4 times a sheared flat block; the r = 0 collar is exactly
    conformally product, so the block doubles smoothly across that face.
    Positive targets are rejected (no such block exists with minimal ends).
    """
    if target >= 0:
        raise ValueError("constant-curvature blocks are available for negative targets only")
    if chart.dim != 3 or chart.normal_axis != 2:
        raise ValueError("constant-curvature block needs a dim-3 chart with collar last")
    length = chart.axis_coordinates(2)[-1]
    if length not in _SHEAR_AMP_CACHE:
        _SHEAR_AMP_CACHE[length] = solve_shear_profile(length).amplitude
    prof = shear_profile_on(chart.axis_coordinates(2), length, _SHEAR_AMP_CACHE[length])
    u = prof.u.reshape(1, 1, -1)
    s = prof.s.reshape(1, 1, -1)
    vals = np.zeros(chart.extents + (3, 3))
    vals[..., 0, 0] = 1.0 + s * s
    vals[..., 0, 1] = s
    vals[..., 1, 1] = 1.0
    vals[..., 2, 2] = 1.0
    scale = math.sqrt(-target)  # R(c^-2 g) = c^2 R
    vals = vals * (u**4)[..., None, None] / scale**2
    return MetricField.from_values(chart, vals)


def product_cylinder_metric(
    chart: GridChart, f: float = 0.0, fiber_radius: float = 1.0, from_face: str = "low"
) -> MetricField:
    """(1 + r^2 f / 2)^{4/(n-2)} (h + dr^2) on a cylinder, h flat or round.

    ``r`` is the distance to the chosen collar end, so the factor is 1 there.
    """
    n = chart.dim
    face = Face(chart.normal_axis, from_face)
    r = chart.collar_distance(face)
    factor = 1.0 + 0.5 * r * r * f
    if np.any(factor <= 0):
        raise ValueError("conformal factor 1 + r^2 f/2 is not positive on the chart")
    vals = np.zeros(chart.extents + (n, n))
    if chart.kind is ChartKind.CYLINDER and chart.axes[0].cover == 2.0:
        th = chart.axis_coordinates(0).reshape(-1, 1, 1)
        vals[..., 0, 0] = fiber_radius**2
        vals[..., 1, 1] = (fiber_radius * np.sin(th)) ** 2
        vals[..., 2, 2] = 1.0
    else:
        vals[...] = np.eye(n)
    vals = vals * (factor ** (4.0 / (n - 2)))[..., None, None]
    return MetricField.from_values(chart, vals)


# ---------------------------------------------------------------------------
# scalar-factor vocabulary (Neumann-compatible by construction)


def mode_field(chart: GridChart, terms: list[dict], constant: float = 1.0) -> ScalarField:
    """Sum of lattice-commensurate separable modes plus a constant.

    Each term: {"amplitude": a, "waves": {axis: k, ...}} where k counts whole
    periods on periodic axes and cosine half-waves along the collar (which
    makes the normal derivative vanish at both collar ends), or
    {"amplitude": a, "cap_power": p} for cos^p(colatitude) on sphere caps.
    """
    vals = np.full(chart.extents, float(constant))
    coords = chart.coordinate_grids()
    for term in terms:
        amp = float(term["amplitude"])
        if "cap_power" in term:
            if chart.kind is not ChartKind.SPHERE_CAP:
                raise ValueError("cap_power terms need a sphere-cap chart")
            p = int(term["cap_power"])
            if p < 2:
                raise ValueError("cap_power must be >= 2 for a Neumann-compatible factor")
            vals = vals + amp * np.cos(coords[0]) ** p
            continue
        factor = np.ones(chart.extents)
        for axis_str, k in term["waves"].items():
            a = int(axis_str)
            k = int(k)
            ax = chart.axes[a]
            x = coords[a]
            if ax.periodic:
                period = ax.count * ax.spacing
                phase = float(term.get("phase", 0.0))
                factor = factor * np.cos(2 * math.pi * k * x / period + phase)
            else:
                length = (ax.count - 1) * ax.spacing
                factor = factor * np.cos(math.pi * k * x / length)
        vals = vals + amp * factor
    return ScalarField(chart, vals)


def random_mode_field(
    chart: GridChart,
    rng: np.random.Generator,
    amplitude: float = 0.1,
    n_terms: int = 3,
    kmax: int = 2,
) -> ScalarField:
    """Seeded random positive factor built from the mode vocabulary."""
    terms = []
    for _ in range(n_terms):
        waves = {}
        for a, ax in enumerate(chart.axes):
            k_hi = max(1, min(kmax, ax.count // 4))
            k = int(rng.integers(0, k_hi + 1))
            if k:
                waves[str(a)] = k
        if not waves:
            waves[str(chart.normal_axis)] = 1
        terms.append({"amplitude": float(rng.uniform(-amplitude, amplitude)), "waves": waves})
    return mode_field(chart, terms, constant=1.0)


def chart_from_descriptor(desc: dict) -> GridChart:
    """GridChart from a JSON-style chart descriptor."""
    from .grid import build_chart

    desc = dict(desc)
    kind = desc.pop("kind")
    desc["extents"] = tuple(desc["extents"])
    if "periods" in desc:
        desc["periods"] = tuple(desc["periods"])
    return build_chart(kind, **desc)


def metric_from_descriptor(
    chart: GridChart, desc: dict, rng: np.random.Generator | None = None
) -> MetricField:
    """MetricField from a JSON-style metric descriptor.

    Kinds: flat, round_cap, twisted_block, constant_curvature, collar_twist,
    product_cylinder, conformal (base + factor terms), random (seeded).
    """
    kind = desc["kind"]
    if kind == "flat":
        return flat_metric(chart)
    if kind == "round_cap":
        return round_cap_metric(chart, desc.get("radius"))
    if kind == "twisted_block":
        return twisted_block_metric(chart, desc.get("tau", math.sqrt(2.0)))
    if kind == "constant_curvature":
        return constant_curvature_block(chart, desc.get("target", -1.0))
    if kind == "collar_twist":
        # (g - 2rA) + dr^2 from flat boundary data with an off-diagonal
        # traceless second form of strength tau/2
        from .constructions import collar_metric

        tau = desc.get("tau", math.sqrt(2.0))
        fshape = tuple(n for a, n in enumerate(chart.extents) if a != chart.normal_axis)
        m = chart.dim - 1
        gb = np.zeros(fshape + (m, m))
        for i in range(m):
            gb[..., i, i] = 1.0
        a2 = np.zeros(fshape + (m, m))
        a2[..., 0, 1] = -tau / 2.0
        a2[..., 1, 0] = -tau / 2.0
        return collar_metric(gb, a2, chart, Face(chart.normal_axis, "low"))
    if kind == "product_cylinder":
        return product_cylinder_metric(
            chart,
            f=desc.get("f", 0.0),
            fiber_radius=desc.get("fiber_radius", 1.0),
            from_face=desc.get("from_face", "low"),
        )
    if kind == "conformal":
        base = metric_from_descriptor(chart, desc["base"], rng)
        u = mode_field(chart, desc.get("terms", []), constant=desc.get("constant", 1.0))
        if np.any(u.values <= 0):
            raise ValueError("conformal factor descriptor must stay positive")
        from .geometry import conformal_metric

        return conformal_metric(base, u)
    if kind == "random":
        if rng is None:
            raise ValueError("random metric needs a seeded generator")
        return random_metric(
            chart, rng, amplitude=desc.get("amplitude", 0.08), kmax=desc.get("kmax", 1)
        )
    raise ValueError(f"unknown metric descriptor kind {kind!r}")


def random_metric(
    chart: GridChart, rng: np.random.Generator, amplitude: float = 0.08, kmax: int = 1
) -> MetricField:
    """Flat metric plus a small smooth random symmetric perturbation.

    Perturbation modes are collar-Neumann cosine profiles times periodic
    waves, keeping boundary geometry tame; amplitude keeps nodal matrices
    positive definite.
    """
    n = chart.dim
    vals = np.zeros(chart.extents + (n, n))
    vals[...] = np.eye(n)
    for i in range(n):
        for j in range(i, n):
            bump = random_mode_field(chart, rng, amplitude=amplitude, n_terms=2, kmax=kmax)
            pert = bump.values - 1.0
            vals[..., i, j] += pert
            if i != j:
                vals[..., j, i] += pert
    return MetricField.from_values(chart, vals)
