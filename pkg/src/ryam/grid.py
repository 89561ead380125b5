"""Structured grids for model manifolds with boundary.

A chart is a tensor-product grid with exactly one non-periodic axis (the
collar/normal direction) and periodic or covering fiber axes.  Three chart
kinds are supported:

* ``TORUS_BLOCK``  -- T^{n-1} x [0, L]; all fiber axes periodic.
* ``CYLINDER``     -- M0 x [0, L] with M0 a flat torus or a round two-sphere.
  The sphere fiber is represented on its orientation double cover
  (colatitude runs over the full circle), which keeps every node away from
  the coordinate poles; quadrature weights carry the 1/2 cover factor.
* ``SPHERE_CAP``   -- geodesic cap of a round sphere (dim 3 or 4).  The
  colatitude axis is staggered off the center pole by half a spacing, and
  stencils at the innermost rows close over the pole through the exact
  antipodal identification, so central differences apply everywhere except
  the boundary row.

Scalar and symmetric-tensor fields live on chart nodes.  Derivatives are
second order: central in the interior and on periodic axes, one-sided at
non-periodic ends.  Quadrature is trapezoid along the collar axis and
midpoint/uniform along periodic axes, weighted by sqrt(det g).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np


class ChartKind(Enum):
    TORUS_BLOCK = "torus_block"
    SPHERE_CAP = "sphere_cap"
    CYLINDER = "cylinder"


@dataclass(frozen=True)
class Face:
    """Boundary face marker: the non-periodic axis and which end."""

    axis: int
    side: str  # "low" | "high"

    def __post_init__(self):
        if self.side not in ("low", "high"):
            raise ValueError(f"face side must be 'low' or 'high', got {self.side!r}")

    def __str__(self):
        return f"axis{self.axis}:{self.side}"


@dataclass(frozen=True)
class Axis:
    """One grid axis.

    ``offset`` shifts node coordinates (staggered axes use offset = h/2).
    ``cover`` divides quadrature weights; a double-covered sphere axis has
    cover = 2 (each manifold point is represented twice along it).
    """

    count: int
    spacing: float
    periodic: bool
    offset: float = 0.0
    cover: float = 1.0

    def coordinates(self) -> np.ndarray:
        return self.offset + self.spacing * np.arange(self.count)


@dataclass(frozen=True)
class GridChart:
    kind: ChartKind
    dim: int
    axes: tuple[Axis, ...]
    boundary_faces: tuple[Face, ...]
    normal_axis: int
    cap_angle: float | None = None
    radius: float = 1.0
    # Axis whose half-period shift realizes the antipodal map of the fiber
    # (used to close stencils over the cap's center pole).  None except for
    # sphere caps.
    pole_shift_axes: tuple[int, ...] = field(default=())

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(ax.spacing for ax in self.axes)

    @property
    def periodic_axes(self) -> frozenset[int]:
        return frozenset(i for i, ax in enumerate(self.axes) if ax.periodic)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.extents))

    @property
    def cover_multiplicity(self) -> float:
        m = 1.0
        for ax in self.axes:
            m *= ax.cover
        return m

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.axes[axis].coordinates()

    def coordinate_grids(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays, one per axis."""
        out = []
        for i, ax in enumerate(self.axes):
            shape = [1] * self.dim
            shape[i] = ax.count
            out.append(ax.coordinates().reshape(shape))
        return tuple(out)

    def collar_distance(self, face: Face) -> np.ndarray:
        """Coordinate distance to ``face`` along the normal axis, broadcastable."""
        if face not in self.boundary_faces:
            raise ValueError(f"chart has no boundary face {face}")
        coords = self.axis_coordinates(face.axis)
        if face.side == "low":
            r = coords - coords[0]
        else:
            r = coords[-1] - coords
        shape = [1] * self.dim
        shape[face.axis] = len(r)
        return r.reshape(shape)

    def face(self, axis: int | None = None, side: str | None = None) -> Face:
        """Convenience lookup of a boundary face (defaults to the normal axis).

        With no side given, returns the unique face when there is only one,
        else the low face.
        """
        a = self.normal_axis if axis is None else axis
        if side is None:
            matching = [f for f in self.boundary_faces if f.axis == a]
            if len(matching) == 1:
                return matching[0]
            side = "low"
        f = Face(a, side)
        if f not in self.boundary_faces:
            raise ValueError(f"chart has no boundary face {f}")
        return f

    def axis_weights(self, axis: int) -> np.ndarray:
        """Per-node 1D quadrature weights along one axis."""
        ax = self.axes[axis]
        if ax.periodic:
            w = np.full(ax.count, ax.spacing)
        else:
            w = np.full(ax.count, ax.spacing)
            if ax.offset == 0.0:
                w[0] = ax.spacing / 2.0
            # A staggered low end (offset h/2) owns the full cell [0, h].
            w[-1] = ax.spacing / 2.0
        return w / ax.cover


# ---------------------------------------------------------------------------
# chart builders


def _check_extents(extents: Iterable[int], periodic: Iterable[bool]):
    for n, per in zip(extents, periodic):
        if per and n < 4:
            raise ValueError(f"periodic axis needs >= 4 nodes, got {n}")
        if not per and n < 5:
            raise ValueError(f"non-periodic axis needs >= 5 nodes, got {n}")


def build_chart(kind: str | ChartKind, **params) -> GridChart:
    """Construct a chart from a descriptor.

    torus_block: dim, extents (fiber..., collar last by default), length,
        periods (optional), periodic_axes (optional).
    cylinder: dim, fiber ("torus"|"sphere"), extents, length, periods.
    sphere_cap: dim (3 or 4), extents, cap_angle, radius.
    """
    kind = ChartKind(kind) if not isinstance(kind, ChartKind) else kind
    if kind is ChartKind.TORUS_BLOCK:
        return _build_torus_block(**params)
    if kind is ChartKind.CYLINDER:
        return _build_cylinder(**params)
    if kind is ChartKind.SPHERE_CAP:
        return _build_sphere_cap(**params)
    raise ValueError(f"unknown chart kind {kind}")


def _build_torus_block(
    dim: int,
    extents: tuple[int, ...],
    length: float = 1.0,
    periods: tuple[float, ...] | None = None,
    periodic_axes: tuple[int, ...] | None = None,
) -> GridChart:
    if dim < 3:
        raise ValueError(f"dim must be >= 3, got {dim}")
    extents = tuple(int(n) for n in extents)
    if len(extents) != dim:
        raise ValueError(f"extents must have length {dim}, got {len(extents)}")
    if periodic_axes is None:
        periodic_axes = tuple(range(dim - 1))
    periodic_axes = tuple(sorted(periodic_axes))
    if len(periodic_axes) != dim - 1:
        raise ValueError("torus block needs exactly one non-periodic axis")
    (collar_axis,) = tuple(a for a in range(dim) if a not in periodic_axes)
    if length <= 0:
        raise ValueError("length must be positive")
    if periods is None:
        periods = tuple(1.0 for _ in periodic_axes)
    if len(periods) != dim - 1:
        raise ValueError("periods must have one entry per periodic axis")
    per_flags = [a in periodic_axes for a in range(dim)]
    _check_extents(extents, per_flags)
    axes = []
    ip = 0
    for a in range(dim):
        if a == collar_axis:
            axes.append(Axis(extents[a], length / (extents[a] - 1), periodic=False))
        else:
            axes.append(Axis(extents[a], periods[ip] / extents[a], periodic=True))
            ip += 1
    faces = (Face(collar_axis, "low"), Face(collar_axis, "high"))
    return GridChart(
        kind=ChartKind.TORUS_BLOCK,
        dim=dim,
        axes=tuple(axes),
        boundary_faces=faces,
        normal_axis=collar_axis,
    )


def _build_cylinder(
    dim: int,
    extents: tuple[int, ...],
    length: float = 1.0,
    fiber: str = "torus",
    periods: tuple[float, ...] | None = None,
    radius: float = 1.0,
) -> GridChart:
    """Fiber x [0, length]; collar is the last axis."""
    if dim < 3:
        raise ValueError(f"dim must be >= 3, got {dim}")
    extents = tuple(int(n) for n in extents)
    if len(extents) != dim:
        raise ValueError(f"extents must have length {dim}, got {len(extents)}")
    collar_axis = dim - 1
    if fiber == "torus":
        chart = _build_torus_block(dim, extents, length=length, periods=periods)
        return GridChart(
            kind=ChartKind.CYLINDER,
            dim=dim,
            axes=chart.axes,
            boundary_faces=chart.boundary_faces,
            normal_axis=collar_axis,
        )
    if fiber != "sphere":
        raise ValueError(f"unknown cylinder fiber {fiber!r}")
    if dim != 3:
        raise ValueError("sphere-fiber cylinders are implemented for dim 3 only")
    n_th, n_ph, n_r = extents
    if n_th % 2:
        raise ValueError("double-covered colatitude axis needs an even node count")
    _check_extents(extents, [True, True, False])
    axes = (
        # colatitude on the double cover [0, 2pi), staggered off the poles
        Axis(n_th, 2 * math.pi / n_th, periodic=True, offset=math.pi / n_th, cover=2.0),
        Axis(n_ph, 2 * math.pi / n_ph, periodic=True),
        Axis(n_r, length / (n_r - 1), periodic=False),
    )
    faces = (Face(collar_axis, "low"), Face(collar_axis, "high"))
    return GridChart(
        kind=ChartKind.CYLINDER,
        dim=3,
        axes=axes,
        boundary_faces=faces,
        normal_axis=collar_axis,
        radius=radius,
    )


def _build_sphere_cap(
    dim: int,
    extents: tuple[int, ...],
    cap_angle: float,
    radius: float = 1.0,
) -> GridChart:
    if dim not in (3, 4):
        raise ValueError("sphere caps are implemented for dim 3 and 4")
    if not 0.0 < cap_angle < math.pi:
        raise ValueError(f"cap_angle must lie in (0, pi), got {cap_angle}")
    extents = tuple(int(n) for n in extents)
    if len(extents) != dim:
        raise ValueError(f"extents must have length {dim}, got {len(extents)}")
    n1 = extents[0]
    if n1 < 5:
        raise ValueError(f"colatitude axis needs >= 5 nodes, got {n1}")
    h1 = cap_angle / (n1 - 0.5)
    if dim == 3:
        n_th, n_ph = extents[1], extents[2]
        if n_th % 2:
            raise ValueError("double-covered fiber colatitude needs an even node count")
        _check_extents(extents[1:], [True, True])
        fiber_axes = (
            Axis(n_th, 2 * math.pi / n_th, periodic=True, offset=math.pi / n_th, cover=2.0),
            Axis(n_ph, 2 * math.pi / n_ph, periodic=True),
        )
        # fiber antipode: theta -> theta + pi (double cover), phi fixed
        pole_shift = (1,)
    else:
        # S^3 fiber in Hopf coordinates (eta, xi1, xi2); eta on a 4-cover circle
        n_eta, n_x1, n_x2 = extents[1], extents[2], extents[3]
        if n_eta % 4:
            raise ValueError("Hopf fiber axis needs a node count divisible by 4")
        if n_x1 % 2 or n_x2 % 2:
            raise ValueError("Hopf circle axes need even node counts")
        _check_extents(extents[1:], [True, True, True])
        fiber_axes = (
            Axis(n_eta, 2 * math.pi / n_eta, periodic=True, offset=math.pi / n_eta, cover=4.0),
            Axis(n_x1, 2 * math.pi / n_x1, periodic=True),
            Axis(n_x2, 2 * math.pi / n_x2, periodic=True),
        )
        # fiber antipode: (eta, xi1, xi2) -> (eta, xi1 + pi, xi2 + pi)
        pole_shift = (2, 3)
    axes = (Axis(n1, h1, periodic=False, offset=h1 / 2.0),) + fiber_axes
    return GridChart(
        kind=ChartKind.SPHERE_CAP,
        dim=dim,
        axes=axes,
        boundary_faces=(Face(0, "high"),),
        normal_axis=0,
        cap_angle=cap_angle,
        radius=radius,
        pole_shift_axes=pole_shift,
    )


# ---------------------------------------------------------------------------
# fields


def _require_same_chart(a, b):
    if a.chart is not b.chart and a.chart != b.chart:
        raise ValueError("fields live on different charts")


@dataclass(frozen=True)
class ScalarField:
    chart: GridChart
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.chart.extents:
            raise ValueError(f"values shape {v.shape} != chart extents {self.chart.extents}")
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, chart: GridChart, value: float) -> "ScalarField":
        return cls(chart, np.full(chart.extents, float(value)))

    @classmethod
    def from_function(cls, chart: GridChart, fn) -> "ScalarField":
        return cls(chart, np.broadcast_to(fn(*chart.coordinate_grids()), chart.extents).copy())


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric (0,2)-tensor per node; the lower triangle mirrors the upper."""

    chart: GridChart
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.chart.dim
        if v.shape != self.chart.extents + (n, n):
            raise ValueError(f"tensor shape {v.shape} incompatible with chart")
        if not np.all(np.isfinite(v)):
            raise ValueError("tensor field contains non-finite values")
        iu = np.triu_indices(n, k=1)
        sym = v.copy()
        sym[..., iu[1], iu[0]] = sym[..., iu[0], iu[1]]
        object.__setattr__(self, "values", sym)

    @property
    def dim(self) -> int:
        return self.chart.dim


class PositivityError(ValueError):
    """A nodal matrix failed positive definiteness."""


@dataclass(frozen=True)
class MetricField:
    tensor: SymTensorField

    def __post_init__(self):
        v = self.tensor.values
        try:
            np.linalg.cholesky(v)
        except np.linalg.LinAlgError:
            # locate one offending node for the error message
            eig = np.linalg.eigvalsh(v)
            bad = np.argwhere(eig[..., 0] <= 0.0)
            idx = tuple(bad[0]) if len(bad) else "unknown"
            raise PositivityError(f"metric not positive definite at node {idx}") from None

    @classmethod
    def from_values(cls, chart: GridChart, values: np.ndarray) -> "MetricField":
        return cls(SymTensorField(chart, values))

    @property
    def chart(self) -> GridChart:
        return self.tensor.chart

    @property
    def values(self) -> np.ndarray:
        return self.tensor.values

    @property
    def dim(self) -> int:
        return self.tensor.chart.dim

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.values)

    def sqrt_det(self) -> np.ndarray:
        return np.sqrt(np.linalg.det(self.values))


@dataclass(frozen=True)
class BoundaryField:
    """Values on one boundary face: scalar or (n-1)x(n-1) matrix per face node."""

    chart: GridChart
    face: Face
    values: np.ndarray

    def __post_init__(self):
        if self.face not in self.chart.boundary_faces:
            raise ValueError(f"chart has no boundary face {self.face}")
        fshape = tuple(
            n for a, n in enumerate(self.chart.extents) if a != self.face.axis
        )
        v = np.asarray(self.values, dtype=float)
        m = self.chart.dim - 1
        if v.shape not in (fshape, fshape + (m, m)):
            raise ValueError(f"boundary values shape {v.shape} does not match face {self.face}")
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# finite differences

# third-order one-sided end stencils (4 points for d1, 5 for d2); the
# curvature of curved-face metrics is dominated by end-row truncation, so the
# ends carry one more order than the interior scheme needs
_D1_LOW = np.array([-11.0, 18.0, -9.0, 2.0]) / 6.0
_D1_HIGH = -_D1_LOW[::-1]
_D2_LOW = np.array([35.0, -104.0, 114.0, -56.0, 11.0]) / 12.0
_D2_HIGH = _D2_LOW[::-1]


def _pole_ghost(
    values: np.ndarray, chart: GridChart, depth: int, rank: int, extra_flips: int = 0
) -> np.ndarray:
    """Ghost slice at staggered-colatitude index ``-depth`` on a sphere cap.

    The chart map satisfies Phi(-t, fiber) = Phi(t, antipode(fiber)); the
    antipode is a half-period shift of ``pole_shift_axes``.  Tensor components
    flip sign once per colatitude index (the reflection Jacobian is
    diag(-1, 1, ..., 1)).
    """
    sl = [slice(None)] * values.ndim
    sl[0] = depth - 1  # node at +((depth-1)+1/2) h mirrors -(depth-1/2) h
    ghost = values[tuple(sl)]
    for ax in chart.pole_shift_axes:
        # ghost lost axis 0, so fiber axis ax sits at position ax-1
        ghost = np.roll(ghost, chart.axes[ax].count // 2, axis=ax - 1)
    if rank:
        sign = np.ones((chart.dim,) * rank)
        for k in range(rank):
            idx = [slice(None)] * rank
            idx[k] = 0
            sign[tuple(idx)] *= -1.0
        ghost = ghost * sign
    if extra_flips % 2:
        ghost = -ghost
    return ghost


def partial_derivative(
    values: np.ndarray,
    axis: int,
    chart: GridChart,
    order: int = 1,
    rank: int | None = None,
    extra_flips: int = 0,
) -> np.ndarray:
    """Second-order partial derivative along one chart axis.

    ``values`` has shape chart.extents + (dim,)*rank; trailing axes are
    coordinate indices (needed for pole-ghost parity on sphere caps).
    ``extra_flips`` counts additional parity flips the field carries under
    the pole reflection, e.g. one per prior derivative taken along the
    colatitude axis.
    """
    if rank is None:
        rank = values.ndim - chart.dim
    ax = chart.axes[axis]
    h = ax.spacing
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    if ax.periodic:
        if order == 1:
            out[:] = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2 * h)
        else:
            out[:] = (np.roll(v, -1, axis=0) - 2 * v + np.roll(v, 1, axis=0)) / (h * h)
        return np.moveaxis(out, 0, axis)

    # Sphere caps keep the colatitude at axis 0, so v == values there and the
    # ghost helper can assume the pole axis leads.
    pole_low = chart.kind is ChartKind.SPHERE_CAP and axis == chart.normal_axis
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2 * h)
        if pole_low:
            out[0] = (v[1] - _pole_ghost(v, chart, 1, rank, extra_flips)) / (2 * h)
        else:
            out[0] = sum(c * v[i] for i, c in enumerate(_D1_LOW)) / h
        out[-1] = sum(c * v[-len(_D1_HIGH) + i] for i, c in enumerate(_D1_HIGH)) / h
    elif order == 2:
        out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
        if pole_low:
            out[0] = (v[1] - 2 * v[0] + _pole_ghost(v, chart, 1, rank, extra_flips)) / (h * h)
        else:
            out[0] = sum(c * v[i] for i, c in enumerate(_D2_LOW)) / (h * h)
        out[-1] = sum(c * v[-len(_D2_HIGH) + i] for i, c in enumerate(_D2_HIGH)) / (h * h)
    else:
        raise ValueError("order must be 1 or 2")
    return np.moveaxis(out, 0, axis)


def coordinate_gradient(values: np.ndarray, chart: GridChart, rank: int | None = None) -> np.ndarray:
    """All first partials; new last axis indexes the derivative direction."""
    if rank is None:
        rank = values.ndim - chart.dim
    parts = [partial_derivative(values, a, chart, 1, rank=rank) for a in range(chart.dim)]
    return np.stack(parts, axis=-1)


def compact_flux_divergence(
    u: np.ndarray, coeff: np.ndarray, axis: int, chart: GridChart
) -> np.ndarray:
    """d_a(coeff * d_a u) with half-node fluxes (compact three-point stencil).

    Conservative form: flux at each inter-node face uses the arithmetic mean
    of ``coeff``; the divergence differences adjacent fluxes.  Periodic axes
    wrap; the cap's pole end closes through the antipodal identification;
    other non-periodic end rows fall back to one-sided differences of the
    node-centered flux.
    """
    ax = chart.axes[axis]
    h = ax.spacing
    uu = np.moveaxis(u, axis, 0)
    cc = np.moveaxis(coeff, axis, 0)
    out = np.empty_like(uu)
    if ax.periodic:
        fhi = 0.5 * (cc + np.roll(cc, -1, 0)) * (np.roll(uu, -1, 0) - uu) / h
        out[:] = (fhi - np.roll(fhi, 1, 0)) / h
        return np.moveaxis(out, 0, axis)
    # interior faces
    fhi = 0.5 * (cc[:-1] + cc[1:]) * (uu[1:] - uu[:-1]) / h  # face i+1/2, i=0..N-2
    out[1:-1] = (fhi[1:] - fhi[:-1]) / h
    pole_low = chart.kind is ChartKind.SPHERE_CAP and axis == chart.normal_axis
    if pole_low:
        ug = _pole_ghost(np.moveaxis(uu, 0, axis), chart, 1, 0)
        cg = _pole_ghost(np.moveaxis(cc, 0, axis), chart, 1, 0)
        flo = 0.5 * (cg + cc[0]) * (uu[0] - ug) / h
        out[0] = (fhi[0] - flo) / h
        fn = cc * _axis_first_derivative(uu, h)
    else:
        # one-sided fallback from node-centered fluxes
        fn = cc * _axis_first_derivative(uu, h)
        out[0] = sum(c * fn[i] for i, c in enumerate(_D1_LOW)) / h
    out[-1] = sum(c * fn[-len(_D1_HIGH) + i] for i, c in enumerate(_D1_HIGH)) / h
    return np.moveaxis(out, 0, axis)


def _axis_first_derivative(v: np.ndarray, h: float) -> np.ndarray:
    """Plain non-periodic first derivative along the leading axis."""
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    out[0] = sum(c * v[i] for i, c in enumerate(_D1_LOW)) / h
    out[-1] = sum(c * v[-len(_D1_HIGH) + i] for i, c in enumerate(_D1_HIGH)) / h
    return out


# ---------------------------------------------------------------------------
# gradient / integrate operations


def gradient(field: ScalarField, metric: MetricField) -> tuple[np.ndarray, ScalarField]:
    """Nodal differential du (covector) and |du|^2_g."""
    _require_same_chart(field, metric)
    chart = field.chart
    du = np.stack(
        [partial_derivative(field.values, a, chart, 1, rank=0) for a in range(chart.dim)],
        axis=-1,
    )
    ginv = metric.inverse()
    sq = np.einsum("...ab,...a,...b->...", ginv, du, du)
    return du, ScalarField(chart, sq)


def quadrature_weights(chart: GridChart) -> np.ndarray:
    """Coordinate-volume weight per node (no metric factor)."""
    w = np.ones(chart.extents)
    for a in range(chart.dim):
        shape = [1] * chart.dim
        shape[a] = chart.extents[a]
        w = w * chart.axis_weights(a).reshape(shape)
    return w


def integrate(
    field: ScalarField, metric: MetricField, domain: str | Face = "interior"
) -> float:
    """Integral of ``field`` against the metric volume (or face area) element."""
    _require_same_chart(field, metric)
    chart = field.chart
    if domain == "interior":
        return float(np.sum(field.values * metric.sqrt_det() * quadrature_weights(chart)))
    face = domain if isinstance(domain, Face) else None
    if face is None:
        raise ValueError(f"unknown integration domain {domain!r}")
    if face not in chart.boundary_faces:
        raise ValueError(f"chart has no boundary face {face}")
    idx = [slice(None)] * chart.dim
    idx[face.axis] = 0 if face.side == "low" else -1
    idx = tuple(idx)
    tang = [a for a in range(chart.dim) if a != face.axis]
    g_face = metric.values[idx][..., tang, :][..., :, tang]
    vals = field.values[idx]
    w = np.ones(vals.shape)
    for k, a in enumerate(tang):
        shape = [1] * (chart.dim - 1)
        shape[k] = chart.extents[a]
        w = w * chart.axis_weights(a).reshape(shape)
    return float(np.sum(vals * np.sqrt(np.linalg.det(g_face)) * w))


def face_slice(chart: GridChart, face: Face) -> tuple:
    """Index tuple selecting the nodes of a boundary face."""
    idx = [slice(None)] * chart.dim
    idx[face.axis] = 0 if face.side == "low" else -1
    return tuple(idx)


def tangential_axes(chart: GridChart, face: Face) -> tuple[int, ...]:
    return tuple(a for a in range(chart.dim) if a != face.axis)
