"""Descriptive-proximity analysis of discrete dynamical systems.

Objects carry feature vectors produced by probe functions; two sets are
descriptively near when their feature sets intersect.  On top of that this
package decides descriptive periodicity, transitivity and sensitivity for a
handful of model systems (circle rotations, the doubling map, Arnold's cat
map) and reproduces the cat-map pixel tracking experiment.
"""

from descprox.proximity import (
    FeatureVector,
    Probe,
    Tolerance,
    check_descriptive_continuity,
    descriptive_intersection,
    descriptively_near,
    evaluate,
)
from descprox.systems import (
    CatMap,
    CircleRotation,
    DescriptiveSystem,
    DoublingMap,
    cat_step,
    double,
    iterate,
    rotate,
)

__all__ = [
    "CatMap",
    "CircleRotation",
    "DescriptiveSystem",
    "DoublingMap",
    "FeatureVector",
    "Probe",
    "Tolerance",
    "cat_step",
    "check_descriptive_continuity",
    "descriptive_intersection",
    "descriptively_near",
    "double",
    "evaluate",
    "iterate",
    "rotate",
]

__version__ = "0.1.0"
