"""Region predicates, theorem sweeps and evaluators for the proof quantities."""

from .geometry import (Region, classify, contains, domain_D, domain_E_plus, half_annulus_A,
                       katsnelson_interior, katsnelson_point, left_half_disk, margin)
from .sweeps import RegionReport, verify_theorem

__all__ = ["Region", "classify", "contains", "margin", "domain_D", "domain_E_plus",
           "half_annulus_A", "katsnelson_interior", "katsnelson_point", "left_half_disk",
           "RegionReport", "verify_theorem"]
