"""Monomer-dimer free energies and entropies from matching measures."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .certified import CertifiedValue
from .errors import InconsistencyError, InputError, MdimError, OutOfRangeError, ResourceLimitError
from .graph import Graph, LatticeSpec, ball, build_box, build_honeycomb_patch
from .matching import MatchingPolynomial, RootMeasure, finite_moments, isolate_roots, matching_counts
from .saw import MomentSequence, average_finite_moments, closed_walk_counts, lattice_moments

__all__ = [
    "CertifiedValue",
    "Graph",
    "InconsistencyError",
    "InputError",
    "LatticeSpec",
    "MatchingPolynomial",
    "MdimError",
    "MomentSequence",
    "OutOfRangeError",
    "ResourceLimitError",
    "RootMeasure",
    "average_finite_moments",
    "ball",
    "build_box",
    "build_honeycomb_patch",
    "closed_walk_counts",
    "finite_moments",
    "isolate_roots",
    "lattice_moments",
    "matching_counts",
    "__version__",
]
