"""Charge lattice, skew pairing and central charges.

A charge is a triple (s, l, r) with s, r integers and l an integer
vector of curve degrees.  The pairing only sees the outer components,

    <(s, l, r), (s', l', r')> = r*s' - s*r',

so the curve part is isotropic and the sign (-1)^<a,b> that twists the
monomial algebra is constant on pure curve/point charges.
"""

from __future__ import annotations

from dataclasses import dataclass


def _as_degree_vector(l) -> tuple:
    if isinstance(l, int):
        return (l,)
    return tuple(int(x) for x in l)


@dataclass(frozen=True)
class LatticeClass:
    s: int
    l: tuple
    r: int

    def __post_init__(self):
        object.__setattr__(self, "l", _as_degree_vector(self.l))
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "r", int(self.r))

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(-self.s, tuple(-x for x in self.l), -self.r)

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        if len(self.l) != len(other.l):
            raise ValueError("degree vectors of different lengths")
        return LatticeClass(
            self.s + other.s,
            tuple(a + b for a, b in zip(self.l, other.l)),
            self.r + other.r,
        )

    def scale(self, k: int) -> "LatticeClass":
        return LatticeClass(k * self.s, tuple(k * x for x in self.l), k * self.r)


def rank_one_class(n: int, beta, rho: int = 1) -> LatticeClass:
    """Charge (-n, -beta, 1) of an ideal-sheaf-like object."""
    l = _as_degree_vector(beta)
    if isinstance(beta, int):
        l = (beta,) + (0,) * (rho - 1)
    return LatticeClass(-n, tuple(-x for x in l), 1)


def torsion_class(n: int, beta, rho: int = 1) -> LatticeClass:
    """Charge (-n, -beta, 0) with no rank component."""
    c = rank_one_class(n, beta, rho)
    return LatticeClass(c.s, c.l, 0)


def skew_pair(a: LatticeClass, b: LatticeClass) -> int:
    if len(a.l) != len(b.l):
        raise ValueError("degree vectors of different lengths")
    return a.r * b.s - a.s * b.r


def twisted_sign(a: LatticeClass, b: LatticeClass) -> int:
    return -1 if skew_pair(a, b) % 2 else 1


@dataclass(frozen=True)
class Geometry:
    """Kahler data: B-field, Kahler form entries (all positive) and
    the normal-direction parameter G.  The point class is normalized
    to central charge 1 per rank unit."""

    B: tuple
    omega: tuple
    G: complex

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(float(x) for x in self.B))
        object.__setattr__(self, "omega", tuple(float(x) for x in self.omega))
        object.__setattr__(self, "G", complex(self.G))
        if len(self.B) != len(self.omega):
            raise ValueError("B and omega must have the same length")
        if not self.omega:
            raise ValueError("empty Kahler data")
        if any(w <= 0 for w in self.omega):
            raise ValueError("omega entries must be positive")

    @property
    def rho(self) -> int:
        return len(self.omega)


def curve_volume(geom: Geometry, l) -> complex:
    """Complexified volume (B + i*omega) . l of a curve class."""
    vec = _as_degree_vector(l)
    if len(vec) != geom.rho:
        raise ValueError("degree vector has wrong length")
    return sum((b + 1j * w) * x for b, w, x in zip(geom.B, geom.omega, vec))


def central_charge(geom: Geometry, a: LatticeClass) -> complex:
    """Z(s, l, r) = s - (B + i*omega) . l + r*G."""
    if len(a.l) != geom.rho:
        raise ValueError("degree vector has wrong length")
    return a.s - curve_volume(geom, a.l) + a.r * geom.G
