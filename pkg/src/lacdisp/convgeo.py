"""Convex polytopes, rotation algebra, and rectangle sandwiching.

Rotations are stored as ordered lists of plane angles (Givens form): the
plane with index j acts on coordinates (j-1, j), and d(d-1)/2 of them in a
fixed schedule compose to any special orthogonal matrix.  A rotated
rectangle is R * S * [-1,1]^d + t for a rotation R, positive diagonal S and
center t.

Every convex body is sandwiched between such rectangles: an inscribed one
loses at most a factor d**d in volume and a circumscribed one at most d!.
Both constructions are recursive over the dimension along a diameter chord
of the body and are implemented here exactly as constructions, with the
containment and volume factors re-verified numerically on every call.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    BadPlaneIndex,
    DegenerateBody,
    EmptySlice,
    NegativeDeterminant,
    NotOrthogonal,
)

__all__ = [
    "GivensAngle",
    "Rotation",
    "ScaleMatrix",
    "Hyperrect",
    "ConvexPolytope",
    "givens_matrix",
    "decompose_rotation",
    "canonical_planes",
    "hadwiger_circumscribe",
    "hadwiger_inscribe",
    "polytope_slice",
    "contains_point",
]

ORTHO_TOL = 1e-12
CONTAIN_TOL = 1e-9      # absolute containment tolerance in the unit cube
DEGENERATE_VOL = 1e-12
TWO_PI = 2.0 * math.pi


def givens_matrix(j: int, gamma: float, d: int) -> np.ndarray:
    """Plane rotation acting on coordinates (j-1, j), 2 <= j <= d.

    The 2x2 block is [[cos g, sin g], [-sin g, cos g]]; all other
    coordinates are fixed.
    """
    if not (2 <= j <= d):
        raise BadPlaneIndex(f"plane index {j} outside [2, {d}]")
    m = np.eye(d)
    c, s = math.cos(gamma), math.sin(gamma)
    a, b = j - 2, j - 1
    m[a, a] = c
    m[b, b] = c
    m[a, b] = s
    m[b, a] = -s
    return m


def canonical_planes(d: int) -> tuple[int, ...]:
    """Plane schedule of the rotation decomposition, d(d-1)/2 entries.

    Column c of the target frame is aligned by sweeping planes d, d-1, ...,
    c+1; the full schedule concatenates those sweeps for c = 1, ..., d-1.
    """
    out = []
    for c in range(1, d):
        out.extend(range(d, c, -1))
    return tuple(out)


@dataclass(frozen=True)
class GivensAngle:
    """Angle gamma in [0, 2*pi) attached to plane index j >= 2."""

    plane_index: int
    angle: float

    def __post_init__(self):
        if self.plane_index < 2:
            raise BadPlaneIndex("plane index must be >= 2")
        object.__setattr__(self, "angle", self.angle % TWO_PI)


@dataclass(frozen=True)
class Rotation:
    """Special orthogonal matrix stored as its canonical angle list.

    The dense matrix is the product G(p_1, g_1) @ ... @ G(p_m, g_m) over the
    canonical plane schedule, i.e. the last list entry acts first on a
    vector.  The dense form is a derived cache; the angles are the data.
    """

    dim: int
    angles: tuple[GivensAngle, ...]
    dense: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        planes = canonical_planes(self.dim)
        if len(self.angles) != len(planes):
            raise BadPlaneIndex(
                f"need {len(planes)} angles for dim {self.dim}, got {len(self.angles)}"
            )
        for ga, p in zip(self.angles, planes):
            if ga.plane_index != p:
                raise BadPlaneIndex(
                    f"angle list must follow the canonical plane schedule {planes}"
                )
        m = np.eye(self.dim)
        for ga in reversed(self.angles):
            m = givens_matrix(ga.plane_index, ga.angle, self.dim) @ m
        err = np.abs(m.T @ m - np.eye(self.dim)).max()
        det = np.linalg.det(m)
        if err >= ORTHO_TOL or abs(det - 1.0) >= ORTHO_TOL:
            raise NotOrthogonal(f"composed matrix drifted: err={err}, det={det}")
        object.__setattr__(self, "dense", m)

    @classmethod
    def identity(cls, d: int) -> "Rotation":
        return cls.from_angle_values(d, [0.0] * (d * (d - 1) // 2))

    @classmethod
    def from_angle_values(cls, d: int, values: Sequence[float]) -> "Rotation":
        planes = canonical_planes(d)
        return cls(d, tuple(GivensAngle(p, v) for p, v in zip(planes, values)))

    def angle_values(self) -> np.ndarray:
        return np.array([ga.angle for ga in self.angles])


def decompose_rotation(m: np.ndarray, tol: float = 1e-10) -> Rotation:
    """Recover the canonical angle list of a special orthogonal matrix.

    Sweeps plane rotations to triangularize the matrix column by column:
    the angle that zeroes entry (k, c) of the working copy is
    atan2(x_k, x_{k-1}) in the plane (k-1, k), applied for k = d, ..., c+1.
    The recorded angles are negated so that composing them in list order
    reproduces the input within ``tol`` in the max norm.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    if m.shape != (d, d):
        raise NotOrthogonal("matrix must be square")
    if np.abs(m.T @ m - np.eye(d)).max() >= 1e-10:
        raise NotOrthogonal("matrix is not orthogonal within 1e-10")
    if np.linalg.det(m) < 0:
        raise NegativeDeterminant("determinant is -1, not a rotation")
    x = m.copy()
    values = []
    for c in range(d - 1):
        for k in range(d - 1, c, -1):
            g = math.atan2(x[k, c], x[k - 1, c])
            cg, sg = math.cos(g), math.sin(g)
            upper = cg * x[k - 1] + sg * x[k]
            lower = -sg * x[k - 1] + cg * x[k]
            x[k - 1] = upper
            x[k] = lower
            values.append(-g)
    rot = Rotation.from_angle_values(d, values)
    if np.abs(rot.dense - m).max() > tol:
        raise NotOrthogonal("round trip exceeded tolerance")
    return rot


@dataclass(frozen=True)
class ScaleMatrix:
    """Positive diagonal scaling."""

    dim: int
    diagonal: tuple[float, ...]

    def __post_init__(self):
        if len(self.diagonal) != self.dim:
            raise ValueError("diagonal length mismatch")
        if any(s <= 0 for s in self.diagonal):
            raise ValueError("scales must be positive")

    def as_array(self) -> np.ndarray:
        return np.array(self.diagonal)


@dataclass(frozen=True)
class Hyperrect:
    """Rotated box  R * S * [-1,1]^d + t."""

    rotation: Rotation
    scale: ScaleMatrix
    center: tuple[float, ...]

    def __post_init__(self):
        if not (self.rotation.dim == self.scale.dim == len(self.center)):
            raise ValueError("dimension mismatch")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return self.scale.dim

    @property
    def volume(self) -> float:
        return 2.0 ** self.dim * float(np.prod(self.scale.as_array()))

    def vertices(self) -> np.ndarray:
        d = self.dim
        signs = np.array(
            [[(i >> b) & 1 for b in range(d)] for i in range(2 ** d)], dtype=float
        ) * 2.0 - 1.0
        rs = self.rotation.dense * self.scale.as_array()[None, :]
        return signs @ rs.T + np.array(self.center)

    def body_coords(self, x: np.ndarray) -> np.ndarray:
        """Map points to the frame where the box is [-1,1]^d."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = (x - np.array(self.center)) @ self.rotation.dense
        return y / self.scale.as_array()[None, :]

    def violation(self, x) -> float:
        """Max over points of (||body coords||_inf - 1), clipped at 0."""
        e = np.abs(self.body_coords(x)).max(axis=1) - 1.0
        return float(max(e.max(), 0.0))

    def contains(self, x, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.body_coords(x)).max(axis=1) <= 1.0 + tol))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "angles": self.rotation.angle_values().tolist(),
            "scales": list(self.scale.diagonal),
            "center": list(self.center),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Hyperrect":
        d = int(obj["dim"])
        return cls(
            Rotation.from_angle_values(d, obj["angles"]),
            ScaleMatrix(d, tuple(obj["scales"])),
            tuple(obj["center"]),
        )

    @classmethod
    def axis_aligned(cls, half_widths: Sequence[float], center: Sequence[float]) -> "Hyperrect":
        d = len(half_widths)
        return cls(Rotation.identity(d), ScaleMatrix(d, tuple(half_widths)), tuple(center))


class ConvexPolytope:
    """Convex hull of a vertex list with derived halfspaces and volume.

    The halfspace form A x <= b comes from the hull; the volume is computed
    twice, by centroid-fan triangulation and by the divergence theorem over
    facets, and the two must agree to 1e-9 relative (this guards the hull
    numerics).  Bodies with volume below 1e-12 are rejected.
    """

    def __init__(self, dim: int, vertices):
        self.dim = dim
        pts = np.atleast_2d(np.asarray(vertices, dtype=float))
        if pts.shape[1] != dim:
            raise ValueError("vertex dimension mismatch")
        if dim == 1:
            lo, hi = float(pts.min()), float(pts.max())
            if hi - lo < DEGENERATE_VOL:
                raise DegenerateBody("1-d body of zero length")
            self.vertices = np.array([[lo], [hi]])
            self.halfspace_A = np.array([[1.0], [-1.0]])
            self.halfspace_b = np.array([hi, -lo])
            self.volume = hi - lo
            self._volume_div = self.volume
            self.diameter_chord = (np.array([lo]), np.array([hi]))
            return
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise DegenerateBody(f"hull failed: {exc}") from exc
        if hull.volume < DEGENERATE_VOL:
            raise DegenerateBody("volume below 1e-12")
        self.vertices = pts[hull.vertices]
        self.halfspace_A = hull.equations[:, :-1]
        self.halfspace_b = -hull.equations[:, -1]
        self.volume = self._triangulation_volume(hull, pts)
        self._volume_div = self._divergence_volume(hull, pts)
        rel = abs(self.volume - self._volume_div) / max(self.volume, 1e-300)
        if rel > 1e-9:
            raise DegenerateBody(
                f"volume routes disagree: {self.volume} vs {self._volume_div}"
            )
        self.diameter_chord = self._diameter()

    @staticmethod
    def _triangulation_volume(hull, pts) -> float:
        c = pts[hull.vertices].mean(axis=0)
        total = 0.0
        fact = math.factorial(pts.shape[1])
        for simplex in hull.simplices:
            mat = pts[simplex] - c
            total += abs(np.linalg.det(mat))
        return total / fact

    @staticmethod
    def _divergence_volume(hull, pts) -> float:
        d = pts.shape[1]
        c = pts[hull.vertices].mean(axis=0)
        fact = math.factorial(d - 1)
        total = 0.0
        for simplex, eq in zip(hull.simplices, hull.equations):
            verts = pts[simplex]
            edges = verts[1:] - verts[0]
            gram = edges @ edges.T
            area = math.sqrt(max(np.linalg.det(gram), 0.0)) / fact
            height = -eq[-1] - eq[:-1] @ c
            total += height * area
        return total / d

    def _diameter(self):
        v = self.vertices
        n = len(v)
        best = (0.0, 0, 0)
        for i in range(n):
            d2 = np.sum((v[i + 1:] - v[i]) ** 2, axis=1)
            if len(d2):
                j = int(np.argmax(d2))
                if d2[j] > best[0]:
                    best = (float(d2[j]), i, i + 1 + j)
        return (v[best[1]].copy(), v[best[2]].copy())

    def contains(self, x, tol: float = CONTAIN_TOL) -> bool:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return bool(np.all(x @ self.halfspace_A.T - self.halfspace_b <= tol))

    def violation(self, x) -> float:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        g = (x @ self.halfspace_A.T - self.halfspace_b).max()
        return float(max(g, 0.0))

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": self.vertices.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "ConvexPolytope":
        return cls(int(obj["dim"]), obj["vertices"])


def contains_point(shape, x, tol: float = None) -> bool:
    """Membership for Hyperrect (inf-norm form) or ConvexPolytope (halfspaces)."""
    if isinstance(shape, Hyperrect):
        return shape.contains(x, tol if tol is not None else 1e-12)
    if isinstance(shape, ConvexPolytope):
        return shape.contains(x, tol if tol is not None else CONTAIN_TOL)
    raise TypeError(f"unsupported shape {type(shape)!r}")


# --- slicing ----------------------------------------------------------------


def _perp_frame(axis: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the complement of a unit vector.

    Deterministic; the combined matrix [columns | axis] has determinant +1.
    """
    d = len(axis)
    q, _ = np.linalg.qr(np.column_stack([axis, np.eye(d)[:, : d - 1]]))
    b = q[:, 1:]
    if np.linalg.det(np.column_stack([b, axis])) < 0:
        b = b.copy()
        b[:, 0] = -b[:, 0]
    return b


def _plane_section_points(vertices: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Points where segments between vertices cross the level z = 0.

    Every vertex of the section lies on an edge of the body, and edges are a
    subset of all vertex pairs, so hulling the crossing points of all pairs
    gives the exact section.
    """
    n = len(vertices)
    pts = [vertices[i] for i in range(n) if abs(z[i]) < 1e-13]
    for i in range(n):
        for j in range(i + 1, n):
            if z[i] * z[j] < 0:
                lam = z[i] / (z[i] - z[j])
                pts.append(vertices[i] + lam * (vertices[j] - vertices[i]))
    return np.array(pts) if pts else np.empty((0, vertices.shape[1]))


def _section_coords(C: ConvexPolytope, axis: np.ndarray, offset: float,
                    origin: np.ndarray, basis: np.ndarray) -> np.ndarray:
    z = C.vertices @ axis - (origin @ axis + offset)
    pts = _plane_section_points(C.vertices, z)
    if len(pts) == 0:
        return pts
    rel = pts - (origin + offset * axis)
    return rel @ basis


def _section_volume(coords: np.ndarray, dim_out: int) -> float:
    if len(coords) < dim_out + 1:
        return 0.0
    if dim_out == 1:
        return float(coords.max() - coords.min())
    try:
        return float(ConvexHull(coords).volume)
    except QhullError:
        return 0.0


def polytope_slice(C: ConvexPolytope, normal, offset: float,
                   return_frame: bool = False):
    """Intersection of C with the plane {x : normal . x = offset}.

    The result is a (d-1)-dimensional polytope expressed in an orthonormal
    in-plane frame with origin at offset * normal.  Raises EmptySlice when
    the plane misses the interior.
    """
    u = np.asarray(normal, dtype=float)
    u = u / np.linalg.norm(u)
    z = C.vertices @ u - offset
    if z.min() > -1e-12 or z.max() < 1e-12:
        raise EmptySlice("plane does not cross the interior")
    basis = _perp_frame(u)
    coords = _section_coords(C, u, offset, np.zeros(C.dim), basis)
    if len(coords) < C.dim:
        raise EmptySlice("section degenerate")
    try:
        poly = ConvexPolytope(C.dim - 1, coords)
    except DegenerateBody as exc:
        raise EmptySlice(str(exc)) from exc
    if return_frame:
        return poly, (offset * u, basis)
    return poly


# --- rectangle sandwiching --------------------------------------------------

SLICE_SCAN = 4096


def _chord_frame(C: ConvexPolytope):
    p, q = C.diameter_chord
    mid = (p + q) / 2.0
    axis = q - p
    h = np.linalg.norm(axis) / 2.0
    axis = axis / (2.0 * h)
    return mid, axis, h, _perp_frame(axis)


def _lift(inner: Hyperrect, mid, axis, basis, z_center: float,
          z_half: float) -> Hyperrect:
    """Embed a (d-1)-dimensional rectangle into the chord frame."""
    d = len(mid)
    block = np.eye(d)
    block[: d - 1, : d - 1] = inner.rotation.dense
    amb = np.column_stack([basis, axis]) @ block
    rot = decompose_rotation(amb)
    scales = tuple(inner.scale.diagonal) + (z_half,)
    center = mid + basis @ np.array(inner.center) + z_center * axis
    return Hyperrect(rot, ScaleMatrix(d, scales), tuple(center))


def hadwiger_circumscribe(C: ConvexPolytope) -> Hyperrect:
    """Rectangle containing C with volume at most d! * vol(C).

    Recursive over the dimension: take a diameter chord of length 2h, whose
    endpoints give parallel support planes; project C onto the mid
    hyperplane, circumscribe the shadow in dimension d-1, and extrude the
    result to height 2h.  The volume bound follows from
    2h * vol(shadow) <= d * vol(C).
    """
    d = C.dim
    if d == 1:
        lo, hi = C.vertices[0, 0], C.vertices[1, 0]
        return Hyperrect.axis_aligned([(hi - lo) / 2.0], [(hi + lo) / 2.0])
    mid, axis, h, basis = _chord_frame(C)
    shadow = (C.vertices - mid) @ basis
    shadow_poly = ConvexPolytope(d - 1, shadow)
    inner = hadwiger_circumscribe(shadow_poly)
    rect = _lift(inner, mid, axis, basis, 0.0, h)
    viol = rect.violation(C.vertices)
    if viol > CONTAIN_TOL:
        raise DegenerateBody(f"circumscribed rectangle misses body by {viol}")
    if rect.volume > math.factorial(d) * C.volume * (1.0 + 1e-6):
        raise DegenerateBody("circumscribed volume factor exceeded d!")
    return rect


def _slice_offsets(h: float, count: int = SLICE_SCAN) -> np.ndarray:
    t = np.linspace(-h, h, count + 2)[1:-1]
    return t[np.argsort(np.abs(t), kind="stable")]


def _mean_value_slice(C: ConvexPolytope, mid, axis, basis, h: float,
                      target: float):
    """First scanned offset (nearest the chord middle first) whose section
    volume reaches vol(C) / (2h); such an offset exists by the mean value
    theorem, and section volume is unimodal, so a ternary search is a safe
    fallback when the fixed scan misses."""
    dim_out = C.dim - 1

    def vol_at(t: float) -> float:
        return _section_volume(_section_coords(C, axis, t, mid, basis), dim_out)

    for t in _slice_offsets(h):
        if vol_at(t) >= target * (1.0 - 1e-12):
            return float(t)
    lo, hi = -h, h
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if vol_at(m1) < vol_at(m2):
            lo = m1
        else:
            hi = m2
    t = (lo + hi) / 2.0
    if vol_at(t) < target * (1.0 - 1e-6):
        raise DegenerateBody("no section reaches the mean value")
    return float(t)


def hadwiger_inscribe(C: ConvexPolytope) -> Hyperrect:
    """Rectangle inside C with volume at least vol(C) / d**d.

    Recursive construction: pick a section through the diameter chord whose
    (d-1)-volume reaches vol(C)/(2h), inscribe a rectangle in that section,
    and take the box spanned by the two sections of the double pyramid over
    the chord endpoints at parameter lambda = 1/d.  Its volume is
    2*lambda*h*(1-lambda)**(d-1) times the inscribed base volume.
    """
    d = C.dim
    if d == 1:
        lo, hi = C.vertices[0, 0], C.vertices[1, 0]
        return Hyperrect.axis_aligned([(hi - lo) / 2.0], [(hi + lo) / 2.0])
    mid, axis, h, basis = _chord_frame(C)
    target = C.volume / (2.0 * h)
    s = _mean_value_slice(C, mid, axis, basis, h, target)
    coords = _section_coords(C, axis, s, mid, basis)
    section = ConvexPolytope(d - 1, coords)
    base = hadwiger_inscribe(section)
    lam = 1.0 / d
    shrink = 1.0 - lam
    inner = Hyperrect(
        base.rotation,
        ScaleMatrix(d - 1, tuple(si * shrink for si in base.scale.diagonal)),
        tuple(ci * shrink for ci in base.center),
    )
    rect = _lift(inner, mid, axis, basis, shrink * s, lam * h)
    viol = C.violation(rect.vertices())
    if viol > CONTAIN_TOL:
        raise DegenerateBody(f"inscribed rectangle escapes body by {viol}")
    if rect.volume < C.volume / d ** d * (1.0 - 1e-6):
        raise DegenerateBody("inscribed volume factor below d**-d")
    return rect
