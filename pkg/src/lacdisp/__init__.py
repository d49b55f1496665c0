"""lacdisp: dispersion analysis for dilated lacunary integer sequences.

Subpackages:
  seqgen      exact sequence generation, subsampling, dilation mod 1
  convgeo     polytopes, rotation algebra, rectangle sandwiching
  testfam     discretized family of rotated rectangles with certificates
  dispersion  empty-region search and scaling experiments
  smoothcount smoothed counters, Poisson summation, moment checks
  cli         command-line front end
"""

__version__ = "0.1.0"

from . import errors  # noqa: F401
from .seqgen import (  # noqa: F401
    DilationVector,
    LacunarySeq,
    PointSet,
    SubsampledSeq,
    check_linear_independence,
    dilate_mod1,
    gen_lacunary,
    subsample,
)
