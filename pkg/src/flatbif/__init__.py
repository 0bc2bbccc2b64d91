"""Exact spectral and bifurcation diagnostics for collapsing flat
manifolds and constant-curvature products.

The package computes, with certified exact arithmetic:

* lattice duals, short vectors, covering radii, and sublattice chains;
* crystallographic group validation, torsion tests, deformation cones,
  and volume-preserving collapse families;
* Laplace spectra of spheres, flat tori, their compact quotients, and
  products, with completeness certificates;
* Morse-index curves along a collapse, isolated bifurcation instants,
  and accumulation diagnostics;
* covering-tower functional ledgers with an exact sphere-threshold
  comparison.
"""

from .errors import (EnumerationOverflow, FlatbifError, GridTooCoarse,
                     IncompleteInput, InvalidGroup, InvalidInput,
                     InvalidLattice, IrreducibleUnexpected,
                     NonIntegerMultiplicity, NonPositiveScal,
                     NotIsometricAction, ScenarioError, Unsupported,
                     UndecidableComparison)
from .exactpi import (PiRat, SymReal, as_exact, ex_cmp, ex_float, ex_sign,
                      ex_str, get_default_precision, parse_exact,
                      set_default_precision)
from .lattices import (Lattice, ShortVectorList, covering_radius, dual,
                       enumerate_short_vectors, first_sublattice_of_index,
                       nested_chain, same_point_set, sublattices_of_index)
from .crystal import (AffineMap, CollapseFamily, CrystalGroup, TorsionResult,
                      ValidationReport, collapse_map, cone_membership,
                      conjugate_group, find_invariant_subspace,
                      is_torsion_free, validate_group)
from .spectra import (ChengReport, ClosedFactor, DiameterBound, SpectrumSlice,
                      bieberbach_spectrum, cheng_bound_check,
                      custom_closed_factor, flat_diameter, product_spectrum,
                      sphere_closed_factor, sphere_spectrum, sphere_volume,
                      torus_spectrum, unit_volume_inv_radius_sq)
from .bifurcation import (AccumulationEvidence, ExactT, IndexResult, Instant,
                          ScanReport, Scenario, accumulation_diagnostic,
                          condition_a_check, crossing_roots, d_rho_crossings,
                          index_at, index_lower_bound, scan)
from .towers import (ForcingReport, ProductMetricData, TowerLedger,
                     hilbert_einstein_value, lambda_zero,
                     minimal_forcing_degree, singular_scal,
                     sphere_yamabe_threshold, tower_simulate)
from .scenario import ScenarioConfig, load_scenario

__version__ = "0.1.0"
