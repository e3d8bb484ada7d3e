"""Product-manifold geometry for the joint precoder / phase-shift variable.

The optimization variable is a triple (W, phi1, phi2):

* ``W`` -- K precoder blocks of shape (M, N_s) whose column-wise stacking
  has unit Frobenius norm (a complex sphere),
* ``phi1``, ``phi2`` -- phase-shift vectors with unit-modulus entries
  (products of complex circles).

The product manifold is the direct product of the three, with the metric
being the unweighted sum of the component real-trace inner products.
Tangent projection and retraction act componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionMismatchError(ValueError):
    """Shapes of two manifold objects do not agree."""


class DegenerateRetractionError(ValueError):
    """Retraction undefined: zero stacked norm or a zero phase entry."""


@dataclass(frozen=True)
class IteratePoint:
    """A point (W, phi1, phi2); on-manifold when :meth:`validate` passes.

    ``w_blocks`` holds the K per-subcarrier precoders as a (K, M, N_s)
    complex array; the unit-norm constraint applies to the whole stack,
    not to individual blocks.  Instances are also used as containers for
    raw off-manifold values (e.g. line-search trial points before
    retraction), so constraints are checked on demand rather than at
    construction.
    """

    w_blocks: np.ndarray  # (K, M, N_s) complex
    phi1: np.ndarray      # (N_i1,) complex
    phi2: np.ndarray      # (N_i2,) complex

    def __post_init__(self):
        object.__setattr__(self, "w_blocks", np.asarray(self.w_blocks, dtype=complex))
        object.__setattr__(self, "phi1", np.asarray(self.phi1, dtype=complex))
        object.__setattr__(self, "phi2", np.asarray(self.phi2, dtype=complex))
        if self.w_blocks.ndim != 3:
            raise DimensionMismatchError(
                f"w_blocks must be (K, M, N_s), got shape {self.w_blocks.shape}")
        if self.phi1.ndim != 1 or self.phi2.ndim != 1:
            raise DimensionMismatchError("phase vectors must be one-dimensional")

    @property
    def n_sub(self) -> int:
        return self.w_blocks.shape[0]

    @property
    def w_stacked(self) -> np.ndarray:
        """Column-wise concatenation of the blocks, shape (M, K*N_s)."""
        k, m, n_s = self.w_blocks.shape
        return self.w_blocks.transpose(1, 0, 2).reshape(m, k * n_s)

    def w_norm(self) -> float:
        return float(np.linalg.norm(self.w_blocks))

    def constraint_residuals(self) -> tuple[float, float]:
        """(sphere residual, worst circle residual) of this point."""
        sphere = abs(float(np.sum(np.abs(self.w_blocks) ** 2)) - 1.0)
        mods = np.concatenate([np.abs(self.phi1), np.abs(self.phi2)])
        circle = float(np.max(np.abs(mods - 1.0))) if mods.size else 0.0
        return sphere, circle

    def validate(self, tol: float = 1e-10) -> None:
        sphere, circle = self.constraint_residuals()
        if sphere > tol:
            raise ValueError(f"stacked precoder norm off unit sphere by {sphere:.3e}")
        if circle > tol:
            raise ValueError(f"phase modulus off unit circle by {circle:.3e}")


@dataclass(frozen=True)
class TangentVector:
    """A direction with the same shapes as an :class:`IteratePoint`.

    Also used as a container for raw (not yet projected) ambient
    directions such as Euclidean gradients; :meth:`validate` checks
    tangency at a given base point when that is actually required.
    """

    xi_blocks: np.ndarray  # (K, M, N_s) complex
    psi1: np.ndarray       # (N_i1,) complex
    psi2: np.ndarray       # (N_i2,) complex

    def __post_init__(self):
        object.__setattr__(self, "xi_blocks", np.asarray(self.xi_blocks, dtype=complex))
        object.__setattr__(self, "psi1", np.asarray(self.psi1, dtype=complex))
        object.__setattr__(self, "psi2", np.asarray(self.psi2, dtype=complex))

    def tangency_residuals(self, base: IteratePoint) -> tuple[float, float]:
        """(sphere residual, worst circle residual) of tangency at ``base``."""
        _check_same_shapes(base, self)
        radial = float(np.real(np.sum(np.conj(self.xi_blocks) * base.w_blocks)))
        rot = np.concatenate([
            np.real(np.conj(self.psi1) * base.phi1),
            np.real(np.conj(self.psi2) * base.phi2),
        ])
        circle = float(np.max(np.abs(rot))) if rot.size else 0.0
        return abs(radial), circle

    def validate(self, base: IteratePoint, tol: float = 1e-10) -> None:
        radial, circle = self.tangency_residuals(base)
        if radial > tol:
            raise ValueError(f"sphere component not tangent, residual {radial:.3e}")
        if circle > tol:
            raise ValueError(f"circle component not tangent, residual {circle:.3e}")

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(factor * self.xi_blocks, factor * self.psi1,
                             factor * self.psi2)


def _check_same_shapes(a, b) -> None:
    shapes_a = _component_shapes(a)
    shapes_b = _component_shapes(b)
    if shapes_a != shapes_b:
        raise DimensionMismatchError(f"component shapes {shapes_a} vs {shapes_b}")


def _component_shapes(obj) -> tuple:
    if isinstance(obj, IteratePoint):
        return (obj.w_blocks.shape, obj.phi1.shape, obj.phi2.shape)
    return (obj.xi_blocks.shape, obj.psi1.shape, obj.psi2.shape)


def inner(u: TangentVector, v: TangentVector) -> float:
    """Real-trace inner product summed over the three components."""
    _check_same_shapes(u, v)
    acc = np.sum(np.conj(u.xi_blocks) * v.xi_blocks)
    acc += np.sum(np.conj(u.psi1) * v.psi1)
    acc += np.sum(np.conj(u.psi2) * v.psi2)
    return float(np.real(acc))


def norm(u: TangentVector) -> float:
    return float(np.sqrt(max(inner(u, u), 0.0)))


def project_to_tangent(base: IteratePoint, ambient: TangentVector) -> TangentVector:
    """Orthogonal projection of an ambient direction onto the tangent space.

    Sphere part: remove the radial component Re{Tr(Xi^H W)} W computed on
    the stacked precoder.  Circle parts: remove the elementwise
    Re{psi* . phi} phi rotations.
    """
    _check_same_shapes(base, ambient)
    radial = np.real(np.sum(np.conj(ambient.xi_blocks) * base.w_blocks))
    xi = ambient.xi_blocks - radial * base.w_blocks
    psi1 = ambient.psi1 - np.real(np.conj(ambient.psi1) * base.phi1) * base.phi1
    psi2 = ambient.psi2 - np.real(np.conj(ambient.psi2) * base.phi2) * base.phi2
    return TangentVector(xi, psi1, psi2)


def retract(raw: IteratePoint) -> IteratePoint:
    """Map a raw point back onto the manifold by componentwise normalization.

    The stacked precoder is divided by its Frobenius norm and every phase
    entry by its modulus; both are the nearest-point projections onto the
    respective constraint sets.
    """
    w_norm = np.linalg.norm(raw.w_blocks)
    if not np.isfinite(w_norm) or w_norm == 0.0:
        raise DegenerateRetractionError("stacked precoder norm is zero or non-finite")
    mod1 = np.abs(raw.phi1)
    mod2 = np.abs(raw.phi2)
    if (mod1 == 0.0).any() or (mod2 == 0.0).any():
        raise DegenerateRetractionError("a phase entry is exactly zero")
    if not (np.isfinite(mod1).all() and np.isfinite(mod2).all()):
        raise DegenerateRetractionError("a phase entry is non-finite")
    return IteratePoint(raw.w_blocks / w_norm, raw.phi1 / mod1, raw.phi2 / mod2)


def move(pt: IteratePoint, direction: TangentVector, scale: float) -> IteratePoint:
    """Raw (off-manifold) point pt + scale * direction; retract afterwards."""
    _check_same_shapes(pt, direction)
    return IteratePoint(pt.w_blocks + scale * direction.xi_blocks,
                        pt.phi1 + scale * direction.psi1,
                        pt.phi2 + scale * direction.psi2)


def random_point(n_sub: int, m_tx: int, n_streams: int, n_irs1: int, n_irs2: int,
                 rng: np.random.Generator) -> IteratePoint:
    """Random manifold point: Gaussian precoder retracted, uniform phases."""
    w = rng.standard_normal((n_sub, m_tx, n_streams)) \
        + 1j * rng.standard_normal((n_sub, m_tx, n_streams))
    phi1 = np.exp(2j * np.pi * rng.random(n_irs1))
    phi2 = np.exp(2j * np.pi * rng.random(n_irs2))
    return retract(IteratePoint(w, phi1, phi2))


def random_tangent(base: IteratePoint, rng: np.random.Generator) -> TangentVector:
    """Random tangent direction at ``base`` (projected Gaussian ambient)."""
    ambient = TangentVector(
        rng.standard_normal(base.w_blocks.shape) + 1j * rng.standard_normal(base.w_blocks.shape),
        rng.standard_normal(base.phi1.shape) + 1j * rng.standard_normal(base.phi1.shape),
        rng.standard_normal(base.phi2.shape) + 1j * rng.standard_normal(base.phi2.shape),
    )
    return project_to_tangent(base, ambient)
