"""trimass: structural, symbolic and numerical analysis of three-reaction
quadratic mass-action systems.

Highlights: exact network parsing and canonical forms, rank / positive-kernel
certificates, reduced Jacobians with closed-form determinants, the complete
oscillation classification of planar quadratic and trimolecular systems,
exhaustive enumeration of the oscillatory trimolecular networks, and an
adaptive integrator with Poincare return-map orbit probes.
"""

from .network import (
    Complex,
    MassActionSystem,
    NetworkError,
    ReactionNetwork,
    canonical_form,
    canonical_key,
    drop_trivial_species,
    is_quadratic,
    is_trimolecular,
    mass_action_rhs,
    molecularity_profile,
    parse_network,
    system,
    trivial_species,
)
from .stoich import (
    DivergenceClass,
    NontrivialityCertificate,
    dulac_divergence_class,
    dynamically_nontrivial,
    lotka_volterra_form,
    positive_divergence_reactions,
    rank,
    source_geometry,
)
from .equilibria import (
    EquilibriumRecord,
    NoPositiveEquilibrium,
    SourcesCollinear,
    StoichiometricClass,
    equilibria_on_class,
    equilibrium_ray,
    planar_equilibrium,
    stoichiometric_class,
)
from .jacobian import (
    ReducedJacobian,
    is_saddle,
    jacobian_at,
    planar_trace,
    reduced_det_formula,
    reduced_jacobian,
)
from .hopf import (
    HopfPoint,
    KappaPath,
    PlanarVerdict,
    Verdict,
    bogdanov_takens_residual,
    find_hopf_point,
    first_lyapunov_coefficient,
    planar_hopf_census,
    source_case,
    theorem_verdict_planar,
)
from .families import FamilyName, FamilyTag, family_network, match_family
from .classify import (
    Admits,
    PeriodicVerdict,
    classify_trimolecular,
    classify_trimolecular_slow,
    expand_to_trimolecular,
)
from .enumeration import EnumerationReport, enumerate_trimolecular
from .dynamics import (
    OrbitStructure,
    ReturnMapSample,
    Trajectory,
    classify_orbit_structure,
    conserved_quantity,
    drift,
    hopf_amplitude_scan,
    integrate,
    integrate_on_class,
    linear_drift,
    predator_prey_transform,
    return_map,
)

__version__ = "0.1.0"
