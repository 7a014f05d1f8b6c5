"""Möbius maps, reflections and the Herglotz kernel for the unit disk and the
upper half-plane.

Both cases are handled by one :class:`Geometry` object.  The base point
``alpha0`` is ``0`` for the disk and ``i`` for the half-plane, and ``zeta0``
is the identity or the Cayley transform respectively.  Half-plane boundary
points may be ``INF`` (the point at infinity of the extended real line).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, PoleError

DISK = "disk"
HALFPLANE = "halfplane"
INF = complex("inf")

POLE_RTOL = 1e-13
BOUNDARY_TOL = 1e-12


def _arr(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _check_pole(den, num, what="pole"):
    den = np.asarray(den)
    num = np.asarray(num)
    bad = np.abs(den) < POLE_RTOL * (1.0 + np.abs(num))
    if np.any(bad & np.isfinite(num)):
        raise PoleError(f"evaluation at a {what}")


class KernelValues(NamedTuple):
    D: complex
    D_R: complex
    D_I: complex


@dataclass(frozen=True)
class Geometry:
    """Unit disk (``case='disk'``) or upper half-plane (``case='halfplane'``)."""

    case: str = DISK

    def __post_init__(self):
        if self.case not in (DISK, HALFPLANE):
            raise DomainError(f"unknown geometry {self.case!r}")

    @property
    def is_disk(self) -> bool:
        return self.case == DISK

    @property
    def alpha0(self) -> complex:
        return 0j if self.is_disk else 1j

    # -- region tests ---------------------------------------------------
    def is_interior(self, z) -> np.ndarray:
        z = _arr(z)
        with np.errstate(invalid="ignore"):
            if self.is_disk:
                return np.abs(z) < 1.0
            return np.isfinite(z) & (z.imag > 0.0)

    def is_boundary(self, t, tol: float = BOUNDARY_TOL) -> np.ndarray:
        t = _arr(t)
        if self.is_disk:
            return np.abs(np.abs(t) - 1.0) <= tol
        return np.isinf(t) | (np.abs(t.imag) <= tol)

    def check_interior(self, z, name="point"):
        if not np.all(self.is_interior(z)):
            raise DomainError(f"{name} {z!r} is not inside the {self.case}")

    # -- elementary factors -------------------------------------------
    def varpi(self, alpha: complex, z):
        z = _arr(z)
        if self.is_disk:
            return 1.0 - np.conj(alpha) * z
        return z - np.conj(alpha)

    @staticmethod
    def varpi_star(alpha: complex, z):
        return _arr(z) - alpha

    def varpi_self(self, z):
        """``varpi_z(z)``: ``1-|z|^2`` (disk) or ``2i Im z`` (half-plane)."""
        z = _arr(z)
        if self.is_disk:
            return (1.0 - np.abs(z) ** 2).astype(complex)
        return 2j * z.imag

    @property
    def varpi0_at_alpha0(self) -> complex:
        return 1.0 + 0j if self.is_disk else 2j

    def depth(self, alpha: complex) -> float:
        """Positive ratio ``varpi_alpha(alpha) / varpi_0(alpha_0)``."""
        if self.is_disk:
            return 1.0 - abs(alpha) ** 2
        return complex(alpha).imag

    def z_factor(self, alpha: complex) -> complex:
        """Unimodular normalisation constant ``z_alpha``."""
        alpha = complex(alpha)
        if alpha == self.alpha0:
            return 1.0 + 0j
        if self.is_disk:
            return -abs(alpha) / alpha
        w = 1.0 + alpha * alpha
        if abs(w) < 1e-14:
            raise DomainError(f"z_alpha is numerically degenerate at {alpha!r}")
        return abs(w) / w

    def varpi_ratio(self, a: complex, b: complex, z):
        """``varpi_a(z) / varpi_b(z)``, equal to 1 at infinity (half-plane)."""
        z = _arr(z)
        num = self.varpi(a, z)
        den = self.varpi(b, z)
        _check_pole(den, num)
        with np.errstate(invalid="ignore"):
            r = num / den
        if not self.is_disk:
            r = np.where(np.isinf(z), 1.0 + 0j, r)
        return r

    # -- maps -----------------------------------------------------------
    def zeta(self, alpha: complex, z):
        """``zeta_alpha(z) = z_alpha varpi*_alpha(z) / varpi_alpha(z)``."""
        z = _arr(z)
        za = self.z_factor(alpha)
        num = z - alpha
        den = self.varpi(alpha, z)
        _check_pole(den, num)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = za * num / den
        if not self.is_disk:
            r = np.where(np.isinf(z), za, r)
        return r[()] if r.ndim == 0 else r

    def zeta0(self, z):
        return self.zeta(self.alpha0, z)

    def zeta0_inv(self, w):
        """Inverse of ``zeta0``; for the half-plane ``w=1`` maps to ``INF``."""
        w = _arr(w)
        if self.is_disk:
            return w[()] if w.ndim == 0 else w
        with np.errstate(divide="ignore", invalid="ignore"):
            r = 1j * (1.0 + w) / (1.0 - w)
        r = np.where(w == 1.0, INF, r)
        # boundary images are real up to rounding
        onb = np.abs(np.abs(w) - 1.0) <= 1e-12
        r = np.where(onb & np.isfinite(r), r.real + 0j, r)
        return r[()] if r.ndim == 0 else r

    def one_minus_abs2_zeta(self, alpha: complex, z, depth: float | None = None):
        """``1 - |zeta_alpha(z)|^2`` without cancellation."""
        z = _arr(z)
        d = self.depth(alpha) if depth is None else depth
        if self.is_disk:
            return d * (1.0 - np.abs(z) ** 2) / np.abs(1.0 - np.conj(alpha) * z) ** 2
        return 4.0 * d * z.imag / np.abs(z - np.conj(alpha)) ** 2

    def hat(self, z):
        """Reflection across the boundary; an involution fixing it."""
        z = _arr(z)
        if self.is_disk:
            if np.any(z == 0):
                raise DomainError("hat(0) is the point at infinity")
            r = np.where(np.isinf(z), 0j, 1.0 / np.conj(z))
        else:
            r = np.conj(z)
        return r[()] if r.ndim == 0 else r

    def kernel(self, t, z) -> KernelValues:
        """Herglotz kernel ``D(t, z)`` with its substar real/imaginary parts.

        Computed through ``s = zeta0(t)`` and ``w = zeta0(z)`` so that the
        half-plane point at infinity needs no special casing.
        """
        s = _arr(self.zeta0(t))
        w = _arr(self.zeta0(z))
        den = s - w
        _check_pole(den, s + w, "kernel pole")
        sw = s * np.conj(w)
        _check_pole(1.0 - sw, 1.0 + sw, "kernel pole")
        D = (s + w) / den
        Dst = (1.0 + sw) / (1.0 - sw)
        return KernelValues(D, 0.5 * (D + Dst), (D - Dst) / 2j)

    def poisson(self, t, alpha: complex, depth: float | None = None):
        """``D_R(t, alpha)`` for boundary ``t`` in the closed form
        ``depth * |varpi_0(t) / varpi_alpha(t)|^2``."""
        t = _arr(t)
        d = self.depth(alpha) if depth is None else depth
        ratio = self.varpi_ratio(self.alpha0, alpha, t)
        return d * np.abs(ratio) ** 2


DISK_GEOMETRY = Geometry(DISK)
HALFPLANE_GEOMETRY = Geometry(HALFPLANE)


def get_geometry(case: str | Geometry) -> Geometry:
    if isinstance(case, Geometry):
        return case
    return Geometry(case)


@dataclass(frozen=True)
class AlphaSeq:
    """Interpolation nodes ``alpha_1, alpha_2, ...`` (``alpha_0`` implied).

    ``rule`` controls indices past the stored prefix: ``"explicit"`` raises,
    ``"constant"`` repeats the last stored point and ``"geometric"`` generates
    ``target*(1-ratio**k)`` (disk) or ``target + i*ratio**k`` (half-plane).

    ``depths`` optionally stores ``varpi_n(alpha_n)/varpi_0(alpha_0)`` exactly,
    for nodes so close to the boundary that the rounded coordinate loses it.
    """

    geom: Geometry
    points: tuple = ()
    rule: str = "explicit"
    ratio: float | None = None
    target: complex | None = None
    depths: tuple | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if self.depths is not None:
            ds = tuple(float(d) for d in self.depths)
            if len(ds) != len(self.points):
                raise DomainError("depths must match points")
            if any(not d > 0 for d in ds):
                raise DomainError("node depths must be positive")
            object.__setattr__(self, "depths", ds)
            if self.geom.is_disk and any(abs(p) > 1.0 for p in self.points):
                raise DomainError("node outside the disk")
        else:
            for p in self.points:
                self.geom.check_interior(p, "alpha")
        if self.rule not in ("explicit", "constant", "geometric"):
            raise DomainError(f"unknown alpha rule {self.rule!r}")
        if self.rule == "constant" and not self.points:
            raise DomainError("constant rule needs a stored point")
        if self.rule == "geometric":
            if self.ratio is None or not 0 < self.ratio < 1 or self.target is None:
                raise DomainError("geometric rule needs 0<ratio<1 and a target")

    # -- constructors -------------------------------------------------------
    @classmethod
    def explicit(cls, geom, points: Iterable[complex], depths=None) -> "AlphaSeq":
        return cls(get_geometry(geom), tuple(points), "explicit", depths=depths)

    @classmethod
    def constant(cls, geom, alpha: complex | None = None) -> "AlphaSeq":
        geom = get_geometry(geom)
        a = geom.alpha0 if alpha is None else alpha
        return cls(geom, (a,), "constant")

    @classmethod
    def geometric(cls, geom, target: complex, ratio: float) -> "AlphaSeq":
        return cls(get_geometry(geom), (), "geometric", ratio=ratio, target=complex(target))

    # -- access ----------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.points)

    def _generated(self, k: int) -> tuple[complex, float]:
        q = self.ratio ** k
        if self.geom.is_disk:
            # 1-|a|^2 with |a| = 1-q
            return self.target * (1.0 - q), q * (2.0 - q)
        return self.target.real + 1j * q, q

    def __getitem__(self, k: int) -> complex:
        if k < 0:
            raise IndexError(k)
        if k == 0:
            return self.geom.alpha0
        if k <= len(self.points):
            return self.points[k - 1]
        if self.rule == "constant":
            return self.points[-1]
        if self.rule == "geometric":
            return self._generated(k)[0]
        raise IndexError(f"alpha_{k} beyond explicit sequence of length {len(self.points)}")

    def depth(self, k: int) -> float:
        """``varpi_k(alpha_k) / varpi_0(alpha_0)``."""
        if k == 0:
            return 1.0
        if self.depths is not None and k <= len(self.points):
            return self.depths[k - 1]
        if self.rule == "constant" and k > len(self.points) and self.depths is not None:
            return self.depths[-1]
        if self.rule == "geometric" and k > len(self.points):
            return self._generated(k)[1]
        return self.geom.depth(self[k])

    def prefix(self, n: int) -> "AlphaSeq":
        pts = [self[k] for k in range(1, n + 1)]
        ds = [self.depth(k) for k in range(1, n + 1)]
        return AlphaSeq(self.geom, tuple(pts), "explicit", depths=tuple(ds) if pts else None)

    def reversed_prefix(self, m: int) -> "AlphaSeq":
        """``(alpha_m, ..., alpha_1, alpha_0, alpha_0, ...)``."""
        pts = [self[k] for k in range(m, -1, -1)]
        ds = [self.depth(k) for k in range(m, -1, -1)]
        return AlphaSeq(self.geom, tuple(pts), "constant", depths=tuple(ds))

    def zeta(self, k: int, z):
        return self.geom.zeta(self[k], z)


# -- module-level operations ------------------------------------------------

def zeta(geom: Geometry, alpha: complex, z):
    geom = get_geometry(geom)
    geom.check_interior(alpha, "alpha")
    return geom.zeta(alpha, z)


def hat(geom: Geometry, z):
    return get_geometry(geom).hat(z)


def herglotz_kernel(geom: Geometry, t, z) -> KernelValues:
    return get_geometry(geom).kernel(t, z)


def blaschke(geom: Geometry, alphas: AlphaSeq, n: int, z):
    """``B_n = zeta_1 zeta_2 ... zeta_n`` (``B_0 = 1``)."""
    z = _arr(z)
    out = np.ones_like(z)
    for k in range(1, n + 1):
        out = out * alphas.zeta(k, z)
    return out[()] if out.ndim == 0 else out


def blaschke_all(alphas: AlphaSeq, n: int, z) -> np.ndarray:
    """Stack ``[B_0(z), ..., B_n(z)]`` along a new leading axis."""
    z = _arr(z)
    out = np.empty((n + 1,) + z.shape, dtype=complex)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * alphas.zeta(k, z)
    return out


def divergence_functional(geom: Geometry, alphas: AlphaSeq, n: int) -> float:
    """Partial sum whose divergence is equivalent to ``B_n -> 0``."""
    geom = get_geometry(geom)
    total = 0.0
    for k in range(1, n + 1):
        a = alphas[k]
        if geom.is_disk:
            total += alphas.depth(k) / (1.0 + abs(a))
        else:
            total += a.imag / (1.0 + abs(a) ** 2)
    return total


def random_alphas(geom: Geometry, n: int, rng: np.random.Generator,
                  rmax: float = 0.8, im_range: Sequence[float] = (0.2, 2.0)) -> AlphaSeq:
    """Random interior nodes for tests and demos."""
    geom = get_geometry(geom)
    if geom.is_disk:
        r = rmax * np.sqrt(rng.uniform(0, 1, n))
        pts = r * np.exp(2j * math.pi * rng.uniform(0, 1, n))
    else:
        pts = rng.uniform(-2, 2, n) + 1j * rng.uniform(*im_range, n)
    return AlphaSeq.explicit(geom, pts)
