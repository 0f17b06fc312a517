"""Named sequences used by the acceptance suite, tests and scripts."""
from __future__ import annotations

from .weights import WeightSequence, make_sequence

CATALOG = {
    "g0.5": "gevrey:s=0.5",
    "g1": "gevrey:s=1",
    "g1.5": "gevrey:s=1.5",
    "g2": "gevrey:s=2",
    "g3": "gevrey:s=3",
    "q2": "qgevrey:q=2",
    "shift_g2": "shift(gevrey:s=2)",
    "const": "gevrey:s=0",
}

# members whose (M_p)^{1/p} grows, so omega_M is finite
GROWING = ("g0.5", "g1", "g1.5", "g2", "g3", "q2", "shift_g2")

_cache: dict[str, WeightSequence] = {}


def get(name: str) -> WeightSequence:
    """Catalog member by short name or by spec string (cached)."""
    spec = CATALOG.get(name, name)
    if spec not in _cache:
        _cache[spec] = make_sequence(spec)
    return _cache[spec]


def members(names=None) -> dict[str, WeightSequence]:
    return {k: get(k) for k in (CATALOG if names is None else names)}
