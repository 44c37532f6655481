"""Staggered (MAC) grid containers, indexing conventions, interpolation, divergence.

Conventions used throughout the package:

- The domain is a cube of ``n`` cells per side with edge length ``h`` and
  origin at 0, so the domain side length is ``L = n * h``.
- Cell ``(i, j, k)`` with ``0 <= i, j, k < n`` has its center at
  ``((i + 1/2) h, (j + 1/2) h, (k + 1/2) h)``.
- Velocity components live at cell faces: ``u`` at x-normal faces with shape
  ``(n+1, n, n)``, ``v`` at y-normal faces ``(n, n+1, n)``, ``w`` at z-normal
  faces ``(n, n, n+1)``.  The ``u`` face ``(i, j, k)`` sits at
  ``(i h, (j + 1/2) h, (k + 1/2) h)`` and analogously for ``v`` and ``w``.
- Scalar fields (pressure, divergence) are cell centered and stored flat in
  ``cell_index`` order: ``i`` fastest, then ``j``, then ``k``.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Cubic grid geometry: ``n`` cells per side, cell edge length ``h``."""

    n: int
    h: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"grid needs at least one cell per side, got n={self.n}")
        if not self.h > 0:
            raise ValueError(f"cell edge length must be positive, got h={self.h}")

    @property
    def side_length(self) -> float:
        return self.n * self.h

    @property
    def num_cells(self) -> int:
        return self.n ** 3


def cell_index(spec: GridSpec, i: int, j: int, k: int) -> int:
    """Flat index of cell (i, j, k); i fastest, bijective over [0, n^3)."""
    n = spec.n
    assert 0 <= i < n and 0 <= j < n and 0 <= k < n, (i, j, k, n)
    return i + n * j + n * n * k


class VelocityField:
    """Face-centered velocity components on a staggered grid."""

    def __init__(self, spec: GridSpec, u=None, v=None, w=None):
        n = spec.n
        self.spec = spec
        self.u = np.zeros((n + 1, n, n)) if u is None else np.asarray(u, dtype=np.float64)
        self.v = np.zeros((n, n + 1, n)) if v is None else np.asarray(v, dtype=np.float64)
        self.w = np.zeros((n, n, n + 1)) if w is None else np.asarray(w, dtype=np.float64)
        if self.u.shape != (n + 1, n, n):
            raise ValueError(f"u must have shape {(n + 1, n, n)}, got {self.u.shape}")
        if self.v.shape != (n, n + 1, n):
            raise ValueError(f"v must have shape {(n, n + 1, n)}, got {self.v.shape}")
        if self.w.shape != (n, n, n + 1):
            raise ValueError(f"w must have shape {(n, n, n + 1)}, got {self.w.shape}")

    def copy(self) -> "VelocityField":
        return VelocityField(self.spec, self.u.copy(), self.v.copy(), self.w.copy())

    def components(self):
        return self.u, self.v, self.w


class ScalarField:
    """Cell-centered scalar values, flat in cell_index order."""

    def __init__(self, spec: GridSpec, data=None):
        self.spec = spec
        if data is None:
            self.data = np.zeros(spec.num_cells)
        else:
            self.data = np.asarray(data, dtype=np.float64)
        if self.data.shape != (spec.num_cells,):
            raise ValueError(
                f"scalar field needs {spec.num_cells} values, got shape {self.data.shape}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.spec, self.data.copy())

    def as_3d(self) -> np.ndarray:
        """View of the data as (n, n, n) with [i, j, k] indexing (no copy)."""
        n = self.spec.n
        return self.data.reshape((n, n, n), order="F")


# Lattice offsets, in units of h, of each component's face lattice relative to
# cell corners: a sample at position p lands at lattice coordinate p/h - offset.
_LATTICE_OFFSETS = ((0.0, 0.5, 0.5), (0.5, 0.0, 0.5), (0.5, 0.5, 0.0))


def _trilinear(arr: np.ndarray, a: float, b: float, c: float) -> float:
    """Trilinear interpolation at lattice coordinate (a, b, c), clamped to the hull."""
    na, nb, nc = arr.shape
    a = min(max(a, 0.0), na - 1.0)
    b = min(max(b, 0.0), nb - 1.0)
    c = min(max(c, 0.0), nc - 1.0)
    i0 = min(int(a), max(na - 2, 0))
    j0 = min(int(b), max(nb - 2, 0))
    k0 = min(int(c), max(nc - 2, 0))
    i1 = min(i0 + 1, na - 1)
    j1 = min(j0 + 1, nb - 1)
    k1 = min(k0 + 1, nc - 1)
    fa = a - i0
    fb = b - j0
    fc = c - k0
    c00 = arr[i0, j0, k0] * (1.0 - fa) + arr[i1, j0, k0] * fa
    c10 = arr[i0, j1, k0] * (1.0 - fa) + arr[i1, j1, k0] * fa
    c01 = arr[i0, j0, k1] * (1.0 - fa) + arr[i1, j0, k1] * fa
    c11 = arr[i0, j1, k1] * (1.0 - fa) + arr[i1, j1, k1] * fa
    return (c00 * (1.0 - fb) + c10 * fb) * (1.0 - fc) + (c01 * (1.0 - fb) + c11 * fb) * fc


def sample_velocity(field: VelocityField, point) -> np.ndarray:
    """Interpolate the velocity at an arbitrary position.

    Each component is interpolated trilinearly on its own face lattice; the
    sample coordinate is clamped component-wise to the lattice hull, so
    samples outside the domain take boundary values rather than extrapolating.
    """
    p = np.asarray(point, dtype=np.float64)
    if p.shape != (3,):
        raise ValueError(f"point must have 3 components, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite sample point {p!r}")
    h = field.spec.h
    out = np.empty(3)
    for axis, (arr, off) in enumerate(zip(field.components(), _LATTICE_OFFSETS)):
        out[axis] = _trilinear(
            arr, p[0] / h - off[0], p[1] / h - off[1], p[2] / h - off[2]
        )
    return out


def divergence(field: VelocityField) -> ScalarField:
    """Per-cell divergence from the six bounding faces: (right-left+...)/h."""
    h = field.spec.h
    u, v, w = field.components()
    div = (
        u[1:, :, :] - u[:-1, :, :]
        + v[:, 1:, :] - v[:, :-1, :]
        + w[:, :, 1:] - w[:, :, :-1]
    ) / h
    return ScalarField(field.spec, div.flatten(order="F"))
