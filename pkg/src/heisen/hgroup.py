"""Heisenberg group arithmetic, Koranyi geometry, and Haar-measure grids.

The group H^n has underlying manifold R^{2n} x R with product

    (x, t) o (y, s) = (x + y, t + s + 2 * sum_j (x_{n+j} y_j - x_j y_{n+j}))

and anisotropic dilations delta_r(x, t) = (r x, r^2 t).  The homogeneous
(Koranyi) norm is ||(x, t)|| = (|x|^4 + 16 t^2)^{1/4}; Haar measure is
Lebesgue measure, and Koranyi balls have volume nu_n r^Q with Q = 2n + 2.

Points are represented either as :class:`HPoint` (scalar API) or as numpy
arrays of shape (..., 2n+1) holding (x_1, ..., x_2n, t) for vectorized work.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss


class DimensionError(ValueError):
    """Group orders of two points disagree."""


class DomainError(ValueError):
    """Argument outside the operation's domain (e.g. dilation factor <= 0)."""


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HPoint:
    """A point of H^n: horizontal part ``x`` (length 2n) and central ``t``."""

    x: tuple
    t: float

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))
        if len(x) < 2 or len(x) % 2 != 0:
            raise DimensionError(f"horizontal part must have even length >= 2, got {len(x)}")
        if not all(math.isfinite(v) for v in x) or not math.isfinite(self.t):
            raise DomainError("HPoint components must be finite")

    @property
    def n(self) -> int:
        return len(self.x) // 2

    def as_array(self) -> np.ndarray:
        return np.array(self.x + (self.t,), dtype=float)

    @staticmethod
    def from_array(arr) -> "HPoint":
        arr = np.asarray(arr, dtype=float)
        return HPoint(tuple(arr[:-1]), float(arr[-1]))


def identity(n: int) -> HPoint:
    return HPoint((0.0,) * (2 * n), 0.0)


def _check_same_n(g: HPoint, h: HPoint):
    if g.n != h.n:
        raise DimensionError(f"group orders differ: {g.n} vs {h.n}")


def group_mul(g: HPoint, h: HPoint) -> HPoint:
    """Group product g o h."""
    _check_same_n(g, h)
    n = g.n
    x = np.asarray(g.x)
    y = np.asarray(h.x)
    twist = 2.0 * float(np.dot(x[n:], y[:n]) - np.dot(x[:n], y[n:]))
    return HPoint(tuple(x + y), g.t + h.t + twist)


def group_inv(g: HPoint) -> HPoint:
    """Group inverse (-x, -t)."""
    return HPoint(tuple(-v for v in g.x), -g.t)


def dilate(r: float, g: HPoint) -> HPoint:
    """Anisotropic dilation delta_r(x, t) = (r x, r^2 t); requires r > 0."""
    if not (r > 0):
        raise DomainError(f"dilation factor must be positive, got {r}")
    return HPoint(tuple(r * v for v in g.x), r * r * g.t)


def koranyi_norm(g: HPoint) -> float:
    """Homogeneous norm (|x|^4 + 16 t^2)^{1/4}."""
    x2 = float(np.dot(g.x, g.x))
    return (x2 * x2 + 16.0 * g.t * g.t) ** 0.25


def dist(g: HPoint, h: HPoint) -> float:
    """Left-invariant distance d(g, h) = ||g^{-1} o h||."""
    _check_same_n(g, h)
    return koranyi_norm(group_mul(group_inv(g), h))


# ---------------------------------------------------------------------------
# vectorized variants on (..., 2n+1) arrays
# ---------------------------------------------------------------------------

def group_mul_arr(g: np.ndarray, h: np.ndarray, n: int) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape[-1] != 2 * n + 1 or h.shape[-1] != 2 * n + 1:
        raise DimensionError("point arrays must have last dimension 2n+1")
    out = np.empty(np.broadcast_shapes(g.shape, h.shape), dtype=float)
    gx, gt = g[..., :-1], g[..., -1]
    hx, ht = h[..., :-1], h[..., -1]
    out[..., :-1] = gx + hx
    twist = 2.0 * (
        np.sum(gx[..., n:] * hx[..., :n], axis=-1)
        - np.sum(gx[..., :n] * hx[..., n:], axis=-1)
    )
    out[..., -1] = gt + ht + twist
    return out


def group_inv_arr(g: np.ndarray) -> np.ndarray:
    return -np.asarray(g, dtype=float)


def koranyi_norm_arr(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    x2 = np.sum(g[..., :-1] ** 2, axis=-1)
    return (x2 * x2 + 16.0 * g[..., -1] ** 2) ** 0.25


def dist_arr(g: np.ndarray, h: np.ndarray, n: int) -> np.ndarray:
    return koranyi_norm_arr(group_mul_arr(group_inv_arr(g), h, n))


# ---------------------------------------------------------------------------
# ball volume
# ---------------------------------------------------------------------------

_NU_CACHE: dict = {}


def _unit_ball_volume(n: int, nodes: int = 200) -> float:
    # vol = (1/2) * |S^{2n-1}| * int_0^1 rho^{2n-1} sqrt(1 - rho^4) drho;
    # substituting rho^2 = sin(phi) makes the integrand polynomial in
    # sin/cos, so Gauss-Legendre converges to machine precision.
    phi, w = leggauss(nodes)
    phi = 0.5 * (phi + 1.0) * (math.pi / 2)
    w = w * (math.pi / 4)
    integrand = np.sin(phi) ** (n - 1) * np.cos(phi) ** 2 / 2.0
    radial = float(np.sum(w * integrand))
    sphere = 2.0 * math.pi ** n / math.gamma(n)
    return 0.5 * sphere * radial


def unit_ball_volume(n: int) -> float:
    """nu_n = |B(0, 1)|, computed once per n by quadrature and cached."""
    if n not in _NU_CACHE:
        _NU_CACHE[n] = _unit_ball_volume(n)
    return _NU_CACHE[n]


def ball_volume(r: float, n: int) -> float:
    """|B(g, r)| = nu_n r^Q with Q = 2n + 2 (center-independent)."""
    if not (r > 0):
        raise DomainError(f"ball radius must be positive, got {r}")
    return unit_ball_volume(n) * r ** (2 * n + 2)


def homogeneous_dimension(n: int) -> int:
    return 2 * n + 2


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Node-centered anisotropic box grid on H^n.

    Horizontal axes span [-Rx, Rx] with Mx nodes each; the central axis
    spans [-Rt, Rt] with Mt nodes.  Mx and Mt are odd so the origin is a
    node.  The recommended anisotropy Rt ~ Rx^2, ht ~ hx^2 mirrors the
    dilation delta_r(x, t) = (r x, r^2 t).
    """

    n: int
    Rx: float
    Rt: float
    Mx: int
    Mt: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("group order n must be >= 1")
        if self.Mx % 2 == 0 or self.Mt % 2 == 0:
            raise DomainError("Mx and Mt must be odd so the origin is a node")
        if self.Mx < 3 or self.Mt < 3:
            raise DomainError("need at least 3 nodes per axis")
        if not (self.Rx > 0 and self.Rt > 0):
            raise DomainError("box half-widths must be positive")

    @property
    def hx(self) -> float:
        return 2.0 * self.Rx / (self.Mx - 1)

    @property
    def ht(self) -> float:
        return 2.0 * self.Rt / (self.Mt - 1)

    @property
    def cell_volume(self) -> float:
        return self.hx ** (2 * self.n) * self.ht

    @property
    def shape(self) -> tuple:
        return (self.Mx,) * (2 * self.n) + (self.Mt,)

    @property
    def size(self) -> int:
        return self.Mx ** (2 * self.n) * self.Mt

    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.Rx, self.Rx, self.Mx)

    def t_axis(self) -> np.ndarray:
        return np.linspace(-self.Rt, self.Rt, self.Mt)

    def meshgrid(self):
        """Coordinate arrays, each of shape ``self.shape``, axis-major order
        (x_1, ..., x_2n, t)."""
        axes = [self.x_axis()] * (2 * self.n) + [self.t_axis()]
        return np.meshgrid(*axes, indexing="ij")

    def points(self) -> np.ndarray:
        """All grid nodes as an array of shape (size, 2n+1)."""
        mesh = self.meshgrid()
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def origin_index(self) -> tuple:
        return ((self.Mx - 1) // 2,) * (2 * self.n) + ((self.Mt - 1) // 2,)

    def nearest_index(self, g: HPoint) -> tuple:
        ix = [int(round((v + self.Rx) / self.hx)) for v in g.x]
        it = int(round((g.t + self.Rt) / self.ht))
        idx = tuple(min(max(i, 0), self.Mx - 1) for i in ix) + (min(max(it, 0), self.Mt - 1),)
        return idx

    def node_point(self, idx) -> HPoint:
        xs = self.x_axis()
        ts = self.t_axis()
        return HPoint(tuple(xs[i] for i in idx[:-1]), float(ts[idx[-1]]))

    def to_json(self) -> dict:
        return {"n": self.n, "Rx": self.Rx, "Rt": self.Rt, "Mx": self.Mx, "Mt": self.Mt}

    @staticmethod
    def from_json(obj: dict) -> "GridSpec":
        return GridSpec(n=int(obj["n"]), Rx=float(obj["Rx"]), Rt=float(obj["Rt"]),
                        Mx=int(obj["Mx"]), Mt=int(obj["Mt"]))


@dataclass
class GridFn:
    """A sampled real function on a GridSpec, with Haar (= Lebesgue) cell
    weights.  ``values`` has shape spec.shape in axis-major order
    (x_1, ..., x_2n, t); serialization flattens in C order."""

    spec: GridSpec
    values: np.ndarray
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.spec.shape:
            if v.size == self.spec.size:
                v = v.reshape(self.spec.shape)
            else:
                raise DomainError(
                    f"value count {v.size} != grid size {self.spec.size}")
        self.values = v

    def copy(self) -> "GridFn":
        return GridFn(self.spec, self.values.copy(), dict(self.flags))

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.spec.cell_volume

    def interp(self, pts: np.ndarray) -> np.ndarray:
        """Multilinear interpolation at points (..., 2n+1); zero outside."""
        pts = np.asarray(pts, dtype=float)
        spec = self.spec
        dims = 2 * spec.n + 1
        flat = pts.reshape(-1, dims)
        los = np.array([-spec.Rx] * (2 * spec.n) + [-spec.Rt])
        hs = np.array([spec.hx] * (2 * spec.n) + [spec.ht])
        sizes = np.array(spec.shape)
        rel = (flat - los) / hs
        i0 = np.floor(rel).astype(int)
        frac = rel - i0
        inside = np.all((rel >= 0) & (rel <= sizes - 1), axis=1)
        i0 = np.clip(i0, 0, sizes - 2)
        out = np.zeros(flat.shape[0])
        for corner in range(1 << dims):
            bits = np.array([(corner >> d) & 1 for d in range(dims)])
            w = np.prod(np.where(bits, frac, 1.0 - frac), axis=1)
            idx = tuple((i0 + bits)[:, d] for d in range(dims))
            out += w * self.values[idx]
        return np.where(inside, out, 0.0).reshape(pts.shape[:-1])

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "values": self.values.ravel().tolist()}

    @staticmethod
    def from_json(obj: dict) -> "GridFn":
        spec = GridSpec.from_json(obj["spec"])
        return GridFn(spec, np.asarray(obj["values"], dtype=float))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @staticmethod
    def loads(s: str) -> "GridFn":
        return GridFn.from_json(json.loads(s))


def grid_from_callable(spec: GridSpec, fn) -> GridFn:
    """Sample ``fn`` on the grid; fn takes an (N, 2n+1) array of points."""
    vals = np.asarray(fn(spec.points()), dtype=float).reshape(spec.shape)
    return GridFn(spec, vals)


def grid_delta(spec: GridSpec, at: HPoint | None = None) -> GridFn:
    """Discrete delta of unit mass (value 1/cell_volume at one node)."""
    vals = np.zeros(spec.shape)
    idx = spec.origin_index() if at is None else spec.nearest_index(at)
    vals[idx] = 1.0 / spec.cell_volume
    return GridFn(spec, vals)


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def _unit_ball_lattice(n: int, target: int) -> np.ndarray:
    """Deterministic quasi-uniform points in the unit Koranyi ball.

    Anisotropic lattice (spacing d horizontally, d^2/2 centrally, matching
    the dilation structure) scaled so the point count is close to target.
    Always includes the origin.
    """
    if target <= 1:
        return np.zeros((1, 2 * n + 1))
    nu = unit_ball_volume(n)
    # cell volume d^{2n} * (2 d^2); count ~ nu / cell.  The central spacing is
    # kept coarser than the horizontal one because the group twist makes the
    # covering radius near |x| ~ 1 horizontal-spacing limited.
    d = (nu / (2.0 * target)) ** (1.0 / (2 * n + 2))
    ax = np.arange(-math.ceil(1.0 / d), math.ceil(1.0 / d) + 1) * d
    at = np.arange(-math.ceil(0.125 / d ** 2), math.ceil(0.125 / d ** 2) + 1) * (2.0 * d * d)
    mesh = np.meshgrid(*([ax] * (2 * n) + [at]), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    keep = koranyi_norm_arr(pts) < 1.0
    pts = pts[keep]
    if not np.any(np.all(pts == 0.0, axis=1)):
        pts = np.vstack([np.zeros(2 * n + 1), pts])
    return pts


def cone_samples(apex: HPoint, s_min: float, s_max: float, levels: int,
                 per_level: int, inset: float = 0.999) -> list:
    """Discretize the cone {(h, s): d(apex, h) < s}.

    Returns (HPoint, s) pairs with s on a geometric ladder of ``levels``
    rungs from s_min to s_max and ``per_level`` points per rung covering
    B(apex, s) quasi-uniformly.  Deterministic given inputs.
    """
    if not (0 < s_min <= s_max):
        raise DomainError("need 0 < s_min <= s_max")
    if levels < 1 or per_level < 1:
        raise DomainError("levels and per_level must be >= 1")
    n = apex.n
    rungs = [s_max] if levels == 1 else list(np.geomspace(s_min, s_max, levels))
    base = _unit_ball_lattice(n, per_level)
    apex_arr = apex.as_array()
    out = []
    for s in rungs:
        scaled = base.copy()
        scaled[:, :-1] *= s * inset
        scaled[:, -1] *= (s * inset) ** 2
        moved = group_mul_arr(apex_arr, scaled, n)
        for row in moved:
            out.append((HPoint.from_array(row), float(s)))
    return out
