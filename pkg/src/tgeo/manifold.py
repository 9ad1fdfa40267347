"""Round-sphere geometry in ambient Euclidean coordinates.

The sphere S^{n+1}(r) in R^{n+2} is modeled extrinsically: points carry their
ambient coordinates, tangent vectors are ambient vectors orthogonal to the
position vector, and the Levi-Civita connection is the tangential projection
of the ambient directional derivative (Gauss formula). This gives exact
constant-curvature geometry with no chart bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

# Central-difference step is FD_STEP_FACTOR * radius.
FD_STEP_FACTOR = 1e-5

# Below this Gram determinant a 2-plane is not trusted at double precision.
DEGENERATE_PLANE_TOL = 1e-14

# Gram-Schmidt pivot threshold: residual norms below this mean rank deficiency.
GS_PIVOT_TOL = 1e-10

_BASE_MATCH_TOL = 1e-9


class DegenerateInputError(ValueError):
    """Input vector or vector list is degenerate (zero, rank-deficient, non-unit)."""


class BasePointMismatchError(ValueError):
    """Two geometric objects that must share a base point do not."""


class DegeneratePlaneError(ValueError):
    """A claimed 2-plane has near-zero Gram determinant."""


def _as_readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _rng_of(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gram_schmidt_rows(mat: np.ndarray, *, pivot_tol: float = GS_PIVOT_TOL,
                      drop: bool = False) -> np.ndarray:
    """Orthonormalize the rows of ``mat`` in order (modified Gram-Schmidt).

    With ``drop=True`` near-dependent rows are skipped instead of raising.
    """
    rows = []
    for raw in np.asarray(mat, dtype=float):
        v = raw.copy()
        for b in rows:
            v -= (v @ b) * b
        # second pass for numerical orthogonality
        for b in rows:
            v -= (v @ b) * b
        norm = np.linalg.norm(v)
        if norm < pivot_tol:
            if drop:
                continue
            raise DegenerateInputError(
                f"gram_schmidt pivot {norm:.3e} below {pivot_tol:.1e}")
        rows.append(v / norm)
    return np.array(rows)


@dataclass(frozen=True)
class SphereSpec:
    """The round sphere S^{n+1}(r) sitting in R^{n+2}.

    ``ambient_dim`` is n+2, ``radius`` is r. The sectional curvature is the
    constant 1/r**2.
    """

    ambient_dim: int
    radius: float = 1.0

    def __post_init__(self):
        if self.ambient_dim < 3:
            raise DegenerateInputError("ambient_dim must be >= 3")
        if not (self.radius > 0):
            raise DegenerateInputError("radius must be positive")

    @property
    def dim(self) -> int:
        """Intrinsic sphere dimension n+1."""
        return self.ambient_dim - 1

    @property
    def curvature_constant(self) -> float:
        return 1.0 / self.radius ** 2

    @property
    def fd_step(self) -> float:
        return FD_STEP_FACTOR * self.radius

    # -- points and tangent vectors ------------------------------------

    def point(self, coords) -> "SpherePoint":
        """Wrap ambient coordinates as a point, normalizing onto the sphere."""
        arr = np.asarray(coords, dtype=float)
        norm = np.linalg.norm(arr)
        if norm < GS_PIVOT_TOL:
            raise DegenerateInputError("cannot normalize a near-zero vector")
        return SpherePoint(self, arr * (self.radius / norm))

    def tangent(self, p: "SpherePoint", vec) -> "TangentVector":
        """Wrap an ambient vector already tangent at p (validated)."""
        return TangentVector(p, np.asarray(vec, dtype=float))

    def zero_tangent(self, p: "SpherePoint") -> "TangentVector":
        return TangentVector(p, np.zeros(self.ambient_dim))

    def project_to_tangent(self, p: "SpherePoint", vec) -> "TangentVector":
        v = np.asarray(vec, dtype=float)
        pc = p.coords
        return TangentVector(p, v - (v @ pc) / self.radius ** 2 * pc)

    def project_array(self, p_coords: np.ndarray, vec: np.ndarray) -> np.ndarray:
        """Array form of tangential projection; rows of ``vec`` if 2-d."""
        scale = self.radius ** 2
        if vec.ndim == 1:
            return vec - (vec @ p_coords) / scale * p_coords
        return vec - np.outer(vec @ p_coords, p_coords) / scale

    # -- metric and curvature ------------------------------------------

    def metric(self, X: "TangentVector", Y: "TangentVector") -> float:
        _check_same_base(X, Y)
        return float(X.vec @ Y.vec)

    def curvature(self, X: "TangentVector", Y: "TangentVector",
                  Z: "TangentVector") -> "TangentVector":
        """R(X,Y)Z = (1/r^2) (<Y,Z> X - <X,Z> Y)."""
        _check_same_base(X, Y)
        _check_same_base(X, Z)
        k = self.curvature_constant
        out = k * ((Y.vec @ Z.vec) * X.vec - (X.vec @ Z.vec) * Y.vec)
        return TangentVector(X.base, out)

    def curvature_array(self, x: np.ndarray, y: np.ndarray,
                        z: np.ndarray) -> np.ndarray:
        k = self.curvature_constant
        return k * ((y @ z) * x - (x @ z) * y)

    def sectional_curvature(self, X: "TangentVector", Y: "TangentVector") -> float:
        _check_same_base(X, Y)
        xx = X.vec @ X.vec
        yy = Y.vec @ Y.vec
        xy = X.vec @ Y.vec
        gram = xx * yy - xy * xy
        if gram < DEGENERATE_PLANE_TOL:
            raise DegeneratePlaneError(f"Gram determinant {gram:.3e} too small")
        r_xyy = self.curvature_array(X.vec, Y.vec, Y.vec)
        return float(r_xyy @ X.vec) / gram

    # -- geodesics -------------------------------------------------------

    def geodesic_point(self, p: "SpherePoint", v: "TangentVector",
                       t: float) -> "SpherePoint":
        """Arc-length geodesic: cos(t/r) p + r sin(t/r) v, |v| = 1 required."""
        if abs(np.linalg.norm(v.vec) - 1.0) > 1e-9:
            raise DegenerateInputError("geodesic_point needs a unit direction")
        s = t / self.radius
        coords = math.cos(s) * p.coords + self.radius * math.sin(s) * v.vec
        return SpherePoint(self, coords)

    def geodesic_velocity(self, p: "SpherePoint", v: "TangentVector",
                          t: float) -> "TangentVector":
        s = t / self.radius
        q = self.geodesic_point(p, v, t)
        vel = -math.sin(s) / self.radius * p.coords + math.cos(s) * v.vec
        return TangentVector(q, vel)

    def _geodesic_coords(self, p_coords: np.ndarray, unit_dir: np.ndarray,
                         t: float) -> np.ndarray:
        s = t / self.radius
        return math.cos(s) * p_coords + self.radius * math.sin(s) * unit_dir

    # -- covariant derivative --------------------------------------------

    def covariant_derivative(self, field_fn: Callable[["SpherePoint"], "TangentVector"],
                             X: "TangentVector", *,
                             jacobian: np.ndarray | None = None,
                             step: float | None = None) -> "TangentVector":
        """nabla_X W for a tangent field W given as ``field_fn``.

        With an ambient ``jacobian`` matrix at X.base the result is the
        projected matrix-vector product. Otherwise the ambient derivative is
        taken by central differences along the great-circle geodesic through
        X.base in direction X. Linear in X; X = 0 gives the zero vector.
        """
        p = X.base
        if jacobian is not None:
            return self.project_to_tangent(p, jacobian @ X.vec)
        speed = np.linalg.norm(X.vec)
        if speed == 0.0:
            return self.zero_tangent(p)
        h = self.fd_step if step is None else step
        u = TangentVector(p, X.vec / speed)
        plus = field_fn(self.geodesic_point(p, u, h)).vec
        minus = field_fn(self.geodesic_point(p, u, -h)).vec
        deriv = (plus - minus) * (speed / (2.0 * h))
        return self.project_to_tangent(p, deriv)

    def fd_derivative_array(self, fn: Callable[[np.ndarray], np.ndarray],
                            p_coords: np.ndarray, direction: np.ndarray,
                            step: float | None = None) -> np.ndarray:
        """Projected central-difference derivative of an array-valued map.

        ``fn`` maps ambient coordinates of a sphere point to an array; the
        derivative is taken along the geodesic from p in ``direction`` and
        projected back to the tangent space at p (row-wise for 2-d values).
        """
        speed = np.linalg.norm(direction)
        if speed == 0.0:
            probe = np.asarray(fn(p_coords), dtype=float)
            return np.zeros_like(probe)
        h = self.fd_step if step is None else step
        u = direction / speed
        plus = np.asarray(fn(self._geodesic_coords(p_coords, u, h)), dtype=float)
        minus = np.asarray(fn(self._geodesic_coords(p_coords, u, -h)), dtype=float)
        return self.project_array(p_coords, (plus - minus) * (speed / (2.0 * h)))

    # -- sampling and frames ----------------------------------------------

    def random_point(self, seed) -> "SpherePoint":
        rng = _rng_of(seed)
        vec = rng.standard_normal(self.ambient_dim)
        return self.point(vec)

    def random_tangent(self, p: "SpherePoint", seed) -> "TangentVector":
        rng = _rng_of(seed)
        return self.project_to_tangent(p, rng.standard_normal(self.ambient_dim))

    def random_orthonormal_frame(self, p: "SpherePoint", seed) -> "Frame":
        rng = _rng_of(seed)
        raw = rng.standard_normal((self.dim, self.ambient_dim))
        rows = gram_schmidt_rows(self.project_array(p.coords, raw))
        return Frame(p, tuple(TangentVector(p, r) for r in rows))

    def gram_schmidt(self, vectors: Sequence["TangentVector"]) -> "Frame":
        if not vectors:
            raise DegenerateInputError("gram_schmidt needs at least one vector")
        p = vectors[0].base
        for v in vectors[1:]:
            _check_same_base(vectors[0], v)
        rows = gram_schmidt_rows(np.array([v.vec for v in vectors]))
        return Frame(p, tuple(TangentVector(p, r) for r in rows))

    def standard_frame(self, p: "SpherePoint") -> "Frame":
        """Deterministic orthonormal tangent frame from the ambient basis.

        Projects the standard basis vectors onto the tangent space and
        orthonormalizes, skipping the one direction that collapses.
        """
        rows = self.standard_frame_rows(p.coords)
        return Frame(p, tuple(TangentVector(p, r) for r in rows))

    def standard_frame_rows(self, p_coords: np.ndarray) -> np.ndarray:
        candidates = self.project_array(p_coords, np.eye(self.ambient_dim))
        rows = gram_schmidt_rows(candidates, pivot_tol=1e-6, drop=True)
        if len(rows) != self.dim:
            raise DegenerateInputError("standard frame construction collapsed")
        return rows

    def complete_frame(self, vectors: Sequence["TangentVector"]) -> "Frame":
        """Extend the given orthonormal tangent vectors to a full frame."""
        p = vectors[0].base
        given = np.array([v.vec for v in vectors])
        candidates = np.vstack([given,
                                self.project_array(p.coords, np.eye(self.ambient_dim))])
        rows = gram_schmidt_rows(candidates, pivot_tol=1e-6, drop=True)
        if len(rows) != self.dim:
            raise DegenerateInputError("frame completion collapsed")
        return Frame(p, tuple(TangentVector(p, r) for r in rows))


@dataclass(frozen=True, eq=False)
class SpherePoint:
    sphere: SphereSpec
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_readonly(self.coords))
        if self.coords.shape != (self.sphere.ambient_dim,):
            raise DegenerateInputError(
                f"point has shape {self.coords.shape}, expected "
                f"({self.sphere.ambient_dim},)")
        r = self.sphere.radius
        if abs(np.linalg.norm(self.coords) - r) > 1e-9 * r:
            raise DegenerateInputError("coordinates do not lie on the sphere")

    def __repr__(self):
        return f"SpherePoint({np.array2string(np.asarray(self.coords), precision=6)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """An ambient vector attached at a base point, orthogonal to it."""

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", _as_readonly(self.vec))
        if self.vec.shape != self.base.coords.shape:
            raise DegenerateInputError("tangent vector has wrong dimension")
        r = self.base.sphere.radius
        bound = 1e-9 * r * max(1.0, float(np.linalg.norm(self.vec)))
        if abs(float(self.vec @ self.base.coords)) > bound:
            raise DegenerateInputError("vector is not tangent to the sphere")

    @property
    def sphere(self) -> SphereSpec:
        return self.base.sphere

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def dot(self, other: "TangentVector") -> float:
        _check_same_base(self, other)
        return float(self.vec @ other.vec)

    def unit(self) -> "TangentVector":
        n = self.norm()
        if n < GS_PIVOT_TOL:
            raise DegenerateInputError("cannot normalize a near-zero tangent vector")
        return TangentVector(self.base, self.vec / n)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self, other)
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self, other)
        return TangentVector(self.base, self.vec - other.vec)

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.vec)

    def __mul__(self, scalar: float) -> "TangentVector":
        return TangentVector(self.base, self.vec * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"TangentVector({np.array2string(np.asarray(self.vec), precision=6)})"


@dataclass(frozen=True, eq=False)
class Frame:
    """An ordered orthonormal list of tangent vectors at one point."""

    base: SpherePoint
    vectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if not self.vectors:
            raise DegenerateInputError("empty frame")
        if len(self.vectors) > self.base.sphere.dim:
            raise DegenerateInputError("more frame vectors than the tangent dimension")
        mat = self.matrix
        gram = mat @ mat.T
        if np.max(np.abs(gram - np.eye(len(self.vectors)))) > 1e-8:
            raise DegenerateInputError("frame is not orthonormal")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([v.vec for v in self.vectors])

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, idx) -> TangentVector:
        return self.vectors[idx]

    def __iter__(self):
        return iter(self.vectors)


def _check_same_base(a, b) -> None:
    pa = a.base.coords if hasattr(a, "base") else a.coords
    pb = b.base.coords if hasattr(b, "base") else b.coords
    if np.max(np.abs(np.asarray(pa) - np.asarray(pb))) > _BASE_MATCH_TOL:
        raise BasePointMismatchError("objects are attached at different points")
