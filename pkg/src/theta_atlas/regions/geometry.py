"""Region predicates in the x-plane and signed margins to their boundaries.

``margin`` is positive inside, negative outside and zero on the boundary. For
the polygon-like regions it is the minimum (intersection) or maximum (union)
of the distances to the individual constraints, which is exact away from
corners and a lower bound on the true distance near them. For Katsnelson's
contour r = e^{|phi|} it is the radial gap e^{|arg z|} - |z|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

HALF_ANNULUS_A = "half_annulus_A"
DOMAIN_D = "domain_D"
DOMAIN_E_PLUS = "domain_E_plus"
KATSNELSON = "katsnelson_interior"
DISK = "disk"
LEFT_HALF_DISK = "left_half_disk"
KINDS = (HALF_ANNULUS_A, DOMAIN_D, DOMAIN_E_PLUS, KATSNELSON, DISK, LEFT_HALF_DISK)

INSIDE, BOUNDARY, OUTSIDE = "inside", "boundary", "outside"


@dataclass(frozen=True)
class Region:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")

    def contains(self, z) -> bool:
        return contains(self, z)

    def margin(self, z) -> float:
        return margin(self, z)

    def describe(self) -> dict:
        return {"kind": self.kind, **{k: self.params[k] for k in sorted(self.params)}}


def half_annulus_A(inner: float = 1.0, outer: float = 5.0) -> Region:
    return Region(HALF_ANNULUS_A, {"inner": inner, "outer": outer})


def domain_D(radius: float = 3.0, imag_bound: float = 3 / math.sqrt(2)) -> Region:
    return Region(DOMAIN_D, {"radius": radius, "imag_bound": imag_bound})


def domain_E_plus(re_min: float = -5792.7, imag_bound: float = 132.0,
                  disk_radius: float = 18.0) -> Region:
    return Region(DOMAIN_E_PLUS, {"re_min": re_min, "imag_bound": imag_bound,
                                  "disk_radius": disk_radius})


def katsnelson_interior() -> Region:
    return Region(KATSNELSON, {})


def disk(radius: float) -> Region:
    return Region(DISK, {"radius": radius})


def left_half_disk(radius: float = 49.8) -> Region:
    return Region(LEFT_HALF_DISK, {"radius": radius})


def katsnelson_point(t: float, upper: bool = True) -> complex:
    """Point of the contour (e^t cos t, +-e^t sin t), t in [0, pi]."""
    w = cmath.exp(t) * cmath.exp(1j * t)
    return w if upper else w.conjugate()


def contains(region: Region, z) -> bool:
    z = complex(z)
    p = region.params
    r = abs(z)
    if region.kind == HALF_ANNULUS_A:
        return z.real >= 0 and p["inner"] < r < p["outer"]
    if region.kind == DOMAIN_D:
        return r <= p["radius"] and z.real <= 0 and abs(z.imag) <= p["imag_bound"]
    if region.kind == DOMAIN_E_PLUS:
        return ((p["re_min"] < z.real < 0 and abs(z.imag) < p["imag_bound"])
                or r < p["disk_radius"])
    if region.kind == KATSNELSON:
        # polar form of the contour: r = e^{|phi|}, |phi| <= pi
        return r < math.exp(abs(cmath.phase(z)))
    if region.kind == DISK:
        return r < p["radius"]
    if region.kind == LEFT_HALF_DISK:
        return z.real < 0 and r < p["radius"]
    raise AssertionError(region.kind)


def margin(region: Region, z) -> float:
    z = complex(z)
    p = region.params
    r = abs(z)
    if region.kind == HALF_ANNULUS_A:
        return min(z.real, r - p["inner"], p["outer"] - r)
    if region.kind == DOMAIN_D:
        return min(p["radius"] - r, -z.real, p["imag_bound"] - abs(z.imag))
    if region.kind == DOMAIN_E_PLUS:
        strip = min(z.real - p["re_min"], -z.real, p["imag_bound"] - abs(z.imag))
        return max(strip, p["disk_radius"] - r)
    if region.kind == KATSNELSON:
        return math.exp(abs(cmath.phase(z))) - r
    if region.kind == DISK:
        return p["radius"] - r
    if region.kind == LEFT_HALF_DISK:
        return min(-z.real, p["radius"] - r)
    raise AssertionError(region.kind)


def classify(region: Region, z, tol: float = 1e-9) -> str:
    m = margin(region, z)
    if abs(m) <= tol:
        return BOUNDARY
    return INSIDE if contains(region, z) else OUTSIDE


__all__ = ["Region", "KINDS", "HALF_ANNULUS_A", "DOMAIN_D", "DOMAIN_E_PLUS", "KATSNELSON",
           "DISK", "LEFT_HALF_DISK", "INSIDE", "BOUNDARY", "OUTSIDE", "half_annulus_A",
           "domain_D", "domain_E_plus", "katsnelson_interior", "disk", "left_half_disk",
           "katsnelson_point", "contains", "margin", "classify"]
