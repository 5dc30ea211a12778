"""Anisotropic material records, crystal-cut rotations, and bulk-wave velocities.

Tensors follow the stress-charge (e-form) constitutive relations in Voigt
notation with engineering shear strain: stress T = c:S - e^T.E and electric
displacement D = eps.E + e:S.  Stiffness rotations therefore use the Bond
stress matrix M(R): c' = M c M^T, e' = R e M^T, eps' = R eps R^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from functools import lru_cache

import numpy as np
import yaml

from .constants import EPSILON_0


class MaterialError(Exception):
    """Raised for invalid material data or unknown material names."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ElasticTensor:
    """6x6 stiffness matrix in Voigt notation, Pa."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (6, 6):
            raise MaterialError(f"stiffness must be 6x6, got {c.shape}")
        if not np.allclose(c, c.T, rtol=0, atol=1e-6 * max(1.0, abs(c).max())):
            raise MaterialError("stiffness matrix must be symmetric")
        object.__setattr__(self, "c", _readonly(0.5 * (c + c.T)))


@dataclass(frozen=True)
class PiezoTensor:
    """3x6 piezoelectric stress coefficients, C/m^2."""

    e: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.shape != (3, 6):
            raise MaterialError(f"piezo tensor must be 3x6, got {e.shape}")
        object.__setattr__(self, "e", _readonly(e))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.e)


@dataclass(frozen=True)
class PermittivityTensor:
    """3x3 permittivity matrix, F/m."""

    eps: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        if eps.shape != (3, 3):
            raise MaterialError(f"permittivity must be 3x3, got {eps.shape}")
        if not np.allclose(eps, eps.T, rtol=0, atol=1e-9 * abs(eps).max()):
            raise MaterialError("permittivity must be symmetric")
        eps = 0.5 * (eps + eps.T)
        if np.any(np.linalg.eigvalsh(eps) <= 0):
            raise MaterialError("permittivity must be positive definite")
        object.__setattr__(self, "eps", _readonly(eps))


@dataclass(frozen=True)
class MaterialRecord:
    """Immutable bundle of density and constitutive tensors for one material."""

    name: str
    rho: float
    c: ElasticTensor
    e: PiezoTensor
    eps: PermittivityTensor
    piezoelectric: bool
    source: str = ""
    validation: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rho <= 0:
            raise MaterialError(f"{self.name}: density must be > 0")
        if not self.piezoelectric and not self.e.is_zero:
            raise MaterialError(
                f"{self.name}: flagged non-piezoelectric but e tensor is nonzero"
            )


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

def rotation_matrix_zxz(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Proper Euler Z-X-Z rotation, R = Rz(gamma) Rx(beta) Rz(alpha)."""

    def rz(t):
        c, s = math.cos(t), math.sin(t)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def rx(t):
        c, s = math.cos(t), math.sin(t)
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])

    return rz(gamma) @ rx(beta) @ rz(alpha)


def rotation_about_axis(axis: np.ndarray, theta: float) -> np.ndarray:
    """Rodrigues rotation by ``theta`` about the (normalized) ``axis``."""
    u = np.asarray(axis, dtype=float)
    n = np.linalg.norm(u)
    if n == 0:
        raise ValueError("rotation axis must be nonzero")
    u = u / n
    ct, st = math.cos(theta), math.sin(theta)
    ux, uy, uz = u
    return np.array(
        [
            [ct + ux * ux * (1 - ct), ux * uy * (1 - ct) - uz * st, ux * uz * (1 - ct) + uy * st],
            [uy * ux * (1 - ct) + uz * st, ct + uy * uy * (1 - ct), uy * uz * (1 - ct) - ux * st],
            [uz * ux * (1 - ct) - uy * st, uz * uy * (1 - ct) + ux * st, ct + uz * uz * (1 - ct)],
        ]
    )


@dataclass(frozen=True)
class CrystalOrientation:
    """Rotation from crystal axes to device axes, plus microring azimuth.

    Device axes: x = in-plane transverse, y = surface normal (up),
    z = propagation direction.  ``euler_zxz`` gives the base frame at
    azimuth 0; ``phi`` rotates the propagation direction about the surface
    normal, tracking position along a microring.
    """

    euler_zxz: tuple = (0.0, 0.0, 0.0)
    phi: float = 0.0

    def rotation_matrix(self) -> np.ndarray:
        base = rotation_matrix_zxz(*self.euler_zxz)
        turn = rotation_about_axis(np.array([0.0, 1.0, 0.0]), -self.phi)
        r = turn @ base
        if abs(np.linalg.det(r) - 1.0) > 1e-12 or np.max(np.abs(r @ r.T - np.eye(3))) > 1e-12:
            raise MaterialError("orientation does not define a proper rotation")
        return r

    def at_azimuth(self, phi: float) -> "CrystalOrientation":
        return CrystalOrientation(self.euler_zxz, phi)

    @classmethod
    def identity(cls) -> "CrystalOrientation":
        return cls((0.0, 0.0, 0.0), 0.0)

    @classmethod
    def from_device_axes(cls, x_axis, y_axis, z_axis, phi: float = 0.0) -> "CrystalOrientation":
        """Orientation whose device basis vectors are given in crystal coords."""
        r = np.array([x_axis, y_axis, z_axis], dtype=float)
        r /= np.linalg.norm(r, axis=1)[:, None]
        if np.max(np.abs(r @ r.T - np.eye(3))) > 1e-9 or np.linalg.det(r) < 0:
            raise MaterialError("device axes must form a right-handed orthonormal triad")
        # Decompose R = Rz(g) Rx(b) Rz(a)
        beta = math.acos(min(1.0, max(-1.0, r[2, 2])))
        if abs(r[2, 2]) < 1.0 - 1e-12:
            alpha = math.atan2(r[2, 0], -r[2, 1])
            gamma = math.atan2(r[0, 2], r[1, 2])
        else:
            alpha = math.atan2(r[1, 0], r[0, 0]) if r[2, 2] > 0 else math.atan2(-r[1, 0], r[0, 0])
            gamma = 0.0
            if r[2, 2] < 0:
                alpha = -alpha
        cand = cls((alpha, beta, gamma), phi)
        if np.max(np.abs(rotation_matrix_zxz(alpha, beta, gamma) - r)) > 1e-9:
            raise MaterialError("Euler decomposition failed for the given axes")
        return cand

    @classmethod
    def x_cut_y_propagation(cls, phi: float = 0.0) -> "CrystalOrientation":
        """X-cut film, propagation along crystal Y at azimuth 0.

        Device x = crystal Z, device y = crystal X, device z = crystal Y.
        """
        return cls.from_device_axes([0, 0, 1], [1, 0, 0], [0, 1, 0], phi)

    @classmethod
    def c_plane(cls, phi: float = 0.0) -> "CrystalOrientation":
        """c-plane substrate: crystal Z up, propagation along crystal X at azimuth 0."""
        return cls.from_device_axes([0, 1, 0], [0, 0, 1], [1, 0, 0], phi)


def bond_stress_matrix(r: np.ndarray) -> np.ndarray:
    """6x6 Bond matrix M for stress/stiffness Voigt rotation, c' = M c M^T."""
    r = np.asarray(r, dtype=float)
    m = np.zeros((6, 6))
    # index pairs for the shear rows/columns in Voigt order (yz, xz, xy)
    pairs = [(1, 2), (0, 2), (0, 1)]
    for i in range(3):
        for j in range(3):
            m[i, j] = r[i, j] ** 2
        for jj, (p, q) in enumerate(pairs):
            m[i, 3 + jj] = 2.0 * r[i, p] * r[i, q]
    for ii, (a, b) in enumerate(pairs):
        for j in range(3):
            m[3 + ii, j] = r[a, j] * r[b, j]
        for jj, (p, q) in enumerate(pairs):
            m[3 + ii, 3 + jj] = r[a, p] * r[b, q] + r[a, q] * r[b, p]
    return m


def rotate_stiffness(c: np.ndarray, r: np.ndarray) -> np.ndarray:
    m = bond_stress_matrix(r)
    return m @ c @ m.T


def rotate_piezo(e: np.ndarray, r: np.ndarray) -> np.ndarray:
    m = bond_stress_matrix(r)
    return r @ e @ m.T


def rotate_permittivity(eps: np.ndarray, r: np.ndarray) -> np.ndarray:
    return r @ eps @ r.T


def rotate_material(m: MaterialRecord, o: CrystalOrientation) -> MaterialRecord:
    """Material record with tensors expressed in the device axes of ``o``."""
    r = o.rotation_matrix()
    return MaterialRecord(
        name=m.name,
        rho=m.rho,
        c=ElasticTensor(rotate_stiffness(m.c.c, r)),
        e=PiezoTensor(rotate_piezo(m.e.e, r)),
        eps=PermittivityTensor(rotate_permittivity(m.eps.eps, r)),
        piezoelectric=m.piezoelectric,
        source=m.source,
        validation=m.validation,
    )


# ---------------------------------------------------------------------------
# Bulk (Christoffel) velocities
# ---------------------------------------------------------------------------

def _strain_projector(n: np.ndarray) -> np.ndarray:
    """6x3 matrix L with S_voigt = i k L u for a plane wave along n."""
    nx, ny, nz = n
    return np.array(
        [
            [nx, 0.0, 0.0],
            [0.0, ny, 0.0],
            [0.0, 0.0, nz],
            [0.0, nz, ny],
            [nz, 0.0, nx],
            [ny, nx, 0.0],
        ]
    )


def christoffel_matrix(m: MaterialRecord, direction: np.ndarray, stiffened: bool = False) -> np.ndarray:
    """Symmetric 3x3 acoustic tensor Gamma with eigenvalues rho*v^2."""
    n = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    L = _strain_projector(n)
    gamma = L.T @ m.c.c @ L
    if stiffened and m.piezoelectric:
        g = L.T @ m.e.e.T @ n  # 3-vector
        denom = n @ m.eps.eps @ n
        gamma = gamma + np.outer(g, g) / denom
    return gamma


def christoffel_velocities(m: MaterialRecord, direction, stiffened: bool = False) -> np.ndarray:
    """Three bulk phase velocities (m/s, ascending) along ``direction``."""
    gamma = christoffel_matrix(m, direction, stiffened=stiffened)
    vals = np.linalg.eigvalsh(gamma)
    vals = np.clip(vals, 0.0, None)
    return np.sqrt(vals / m.rho)


def _direction_grid(n_polar: int = 24, n_azimuth: int = 48) -> np.ndarray:
    """Deterministic unit-direction grid including the principal axes."""
    dirs = [np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0])]
    for i in range(1, n_polar):
        th = math.pi * i / n_polar
        for j in range(n_azimuth):
            ph = 2 * math.pi * j / n_azimuth
            dirs.append(
                np.array(
                    [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
                )
            )
    return np.array(dirs)


def slowest_transverse_velocity(m: MaterialRecord, stiffened: bool = False, grid=None) -> float:
    """Minimum of the slowest bulk-wave branch over a direction grid."""
    grid = _direction_grid() if grid is None else grid
    best = math.inf
    for n in grid:
        v = christoffel_velocities(m, n, stiffened=stiffened)
        best = min(best, float(v[0]))
    return best


@dataclass(frozen=True)
class ConfinementReport:
    v_waveguide: float
    v_substrate: float
    confining: bool


def confinement_screen(waveguide_m: MaterialRecord, substrate_m: MaterialRecord) -> ConfinementReport:
    """Velocity-contrast screen: the film must be acoustically slower than the substrate."""
    v_wg = slowest_transverse_velocity(waveguide_m)
    v_sub = slowest_transverse_velocity(substrate_m)
    return ConfinementReport(v_wg, v_sub, v_wg < v_sub)


# ---------------------------------------------------------------------------
# Database
# ---------------------------------------------------------------------------

_STIFFNESS_BUILDERS = {}


def _register(symmetry):
    def deco(fn):
        _STIFFNESS_BUILDERS[symmetry] = fn
        return fn

    return deco


@_register("isotropic")
def _c_isotropic(p):
    lam, mu = p["lambda"], p["mu"]
    c = np.zeros((6, 6))
    c[:3, :3] = lam
    for i in range(3):
        c[i, i] = lam + 2 * mu
        c[3 + i, 3 + i] = mu
    return c


@_register("cubic")
def _c_cubic(p):
    c = np.zeros((6, 6))
    c[:3, :3] = p["c12"]
    for i in range(3):
        c[i, i] = p["c11"]
        c[3 + i, 3 + i] = p["c44"]
    return c


@_register("hexagonal")
def _c_hexagonal(p):
    c = np.zeros((6, 6))
    c11, c12, c13, c33, c44 = (p[k] for k in ("c11", "c12", "c13", "c33", "c44"))
    c66 = p.get("c66", 0.5 * (c11 - c12))
    c[0, 0] = c[1, 1] = c11
    c[0, 1] = c[1, 0] = c12
    c[0, 2] = c[2, 0] = c[1, 2] = c[2, 1] = c13
    c[2, 2] = c33
    c[3, 3] = c[4, 4] = c44
    c[5, 5] = c66
    return c


@_register("trigonal")
def _c_trigonal(p):
    c = _c_hexagonal(p)
    c14 = p["c14"]
    c[0, 3] = c[3, 0] = c14
    c[1, 3] = c[3, 1] = -c14
    c[4, 5] = c[5, 4] = c14
    return c


def _piezo_matrix(symmetry: str, p: dict) -> np.ndarray:
    e = np.zeros((3, 6))
    if not p:
        return e
    if symmetry == "hexagonal":  # class 6mm
        e[0, 4] = p["e15"]
        e[1, 3] = p["e15"]
        e[2, 0] = e[2, 1] = p["e31"]
        e[2, 2] = p["e33"]
    elif symmetry == "trigonal-3m":
        e15, e22, e31, e33 = (p[k] for k in ("e15", "e22", "e31", "e33"))
        e[0, 4] = e15
        e[0, 5] = -e22
        e[1, 0] = -e22
        e[1, 1] = e22
        e[1, 3] = e15
        e[2, 0] = e[2, 1] = e31
        e[2, 2] = e33
    elif symmetry == "trigonal-32":
        e11, e14 = p["e11"], p["e14"]
        e[0, 0] = e11
        e[0, 1] = -e11
        e[0, 3] = e14
        e[1, 4] = -e14
        e[1, 5] = -e11
    else:
        raise MaterialError(f"no piezo pattern for symmetry {symmetry!r}")
    return e


def _build_record(name: str, raw: dict) -> MaterialRecord:
    required = {"density", "symmetry", "piezoelectric", "stiffness_gpa", "permittivity_rel", "source"}
    missing = required - set(raw)
    if missing:
        raise MaterialError(f"{name}: missing fields {sorted(missing)}")
    sym = raw["symmetry"]
    base_sym = sym.split("-")[0] if sym.startswith("trigonal") else sym
    if base_sym not in _STIFFNESS_BUILDERS:
        raise MaterialError(f"{name}: unknown symmetry {sym!r}")
    cpa = {k: float(v) * 1e9 for k, v in raw["stiffness_gpa"].items()}
    c = _STIFFNESS_BUILDERS[base_sym](cpa)
    perm = raw["permittivity_rel"]
    if set(perm) == {"eps11", "eps33"}:
        eps = np.diag([perm["eps11"], perm["eps11"], perm["eps33"]]).astype(float) * EPSILON_0
    elif set(perm) == {"eps"}:
        eps = np.eye(3) * float(perm["eps"]) * EPSILON_0
    else:
        raise MaterialError(f"{name}: permittivity needs eps or (eps11, eps33)")
    piezo = bool(raw["piezoelectric"])
    e = _piezo_matrix(sym if "-" in sym else base_sym, raw.get("piezo_cm2", {})) if piezo else np.zeros((3, 6))
    if piezo and not np.any(e):
        raise MaterialError(f"{name}: flagged piezoelectric but no piezo constants given")
    return MaterialRecord(
        name=name,
        rho=float(raw["density"]),
        c=ElasticTensor(c),
        e=PiezoTensor(e),
        eps=PermittivityTensor(eps),
        piezoelectric=piezo,
        source=str(raw["source"]),
        validation=dict(raw.get("validation", {})),
    )


@lru_cache(maxsize=1)
def _load_database() -> dict:
    text = resources.files("phonqad.data").joinpath("materials.yaml").read_text()
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict) or "materials" not in doc:
        raise MaterialError("material database must contain a 'materials' mapping")
    return {name: _build_record(name, raw) for name, raw in doc["materials"].items()}


def material_names() -> list:
    return sorted(_load_database())


def lookup_material(name: str) -> MaterialRecord:
    """Fetch a named record from the shipped database."""
    db = _load_database()
    try:
        return db[name]
    except KeyError:
        raise MaterialError(
            f"unknown material {name!r}; available: {', '.join(sorted(db))}"
        ) from None


def isotropic_equivalent(m: MaterialRecord) -> MaterialRecord:
    """Isotropic, non-piezoelectric stand-in with Voigt-averaged moduli."""
    c = m.c.c
    lam = (c[0, 1] + c[0, 2] + c[1, 2]) / 3.0
    mu = (c[3, 3] + c[4, 4] + c[5, 5]) / 3.0
    ciso = _c_isotropic({"lambda": lam, "mu": mu})
    eps_iso = np.eye(3) * np.trace(m.eps.eps) / 3.0
    return MaterialRecord(
        name=m.name + "-isotropic",
        rho=m.rho,
        c=ElasticTensor(ciso),
        e=PiezoTensor(np.zeros((3, 6))),
        eps=PermittivityTensor(eps_iso),
        piezoelectric=False,
        source=f"isotropic average of {m.name}",
    )
