"""Attractors of plane iterated function systems and plane homeomorphisms on grids.

The modules build on one another: :mod:`grid` holds discretised compact sets,
:mod:`hyperspace` the Hausdorff metric, :mod:`ifs` contractive systems and
their attractors, :mod:`shape` the shape classification of plane continua,
:mod:`homeo` attractors of parametrised homeomorphisms and :mod:`conley`
attractor blocks of non-contractive systems.
"""
__version__ = "0.1.0"

from .errors import (AttractorError, ConfigError, ContractivityError, ConvergenceError,
                     DisconnectedError, EmptySetError, GeometryError, InconclusiveShapeError,
                     NestednessError, NotRepellingError, OutOfBoundsError)
from .grid import (Annulus, BitGrid, ComponentReport, Disk, Polygon, Rect, closing, components,
                   dilate, downsample, erode, fill_holes, interior_nonempty, new_grid,
                   subset_of_interior)
from .hyperspace import ConvergenceTrace, directed_distance, hausdorff_distance
from .ifs import (AffineMap2, AttractorReport, IFSystem, attractor_chaos_game,
                  attractor_deterministic, box_counting_dimension, contraction_factor,
                  example_41_ifs, hutchinson, koch_ifs, render_attractor, sierpinski_ifs,
                  similarity)
from .shape import ShapeClass, Verdict, cech_h1_rank, check_theorem_41, classify_shape
from .homeo import (MapFamily, attractor_from_trapping, hopf_scan, neimark_sacker_family,
                    repulsion_basin, robustness_check, verify_trapping_region)
from .conley import (InvertibleIFS, conley_attractor, continuation, system_image,
                     verify_attractor_block)
