"""Exact intersection calculus on moduli of stable rational curves and a
two-pipeline verification of product curve counts."""

from .curves import (
    CurveClass,
    DegreeMonoid,
    MonoidMap,
    c1_pairing,
    compose,
    decompositions,
    identity_map,
    projection_map,
    pushforward,
    zero_map,
)
from .graphs import (
    MarkedGraph,
    ModularGraph,
    StabilityReport,
    canonicalize,
    contract_edge,
    moduli_dimension,
    validate,
)
from .functors import (
    StabilizingMorphism,
    absolute_stabilization,
    add_tails,
    psi_image,
    pushforward_stabilize,
    splitting_pullback,
)
from .mbar import (
    CycleMonomial,
    StratumTree,
    enumerate_strata,
    evaluate_monomial,
    pairing_matrix,
    stratum_to_monomial,
)
from .gw import (
    GWPairingVector,
    gw_pairing_vector,
    kunneth_sign,
    reconstruct_and_cup,
    stratum_pairing,
    vertex_invariant_p1,
)
from .targets import P1, P1XP1, P2, TargetSpace, get_target
from .wdvv import wdvv_number
from .verify import VerificationReport, verify_product

__version__ = "0.1.0"

__all__ = [
    "CurveClass",
    "DegreeMonoid",
    "MonoidMap",
    "c1_pairing",
    "compose",
    "decompositions",
    "identity_map",
    "projection_map",
    "pushforward",
    "zero_map",
    "MarkedGraph",
    "ModularGraph",
    "StabilityReport",
    "canonicalize",
    "contract_edge",
    "moduli_dimension",
    "validate",
    "StabilizingMorphism",
    "absolute_stabilization",
    "add_tails",
    "psi_image",
    "pushforward_stabilize",
    "splitting_pullback",
    "CycleMonomial",
    "StratumTree",
    "enumerate_strata",
    "evaluate_monomial",
    "pairing_matrix",
    "stratum_to_monomial",
    "GWPairingVector",
    "gw_pairing_vector",
    "kunneth_sign",
    "reconstruct_and_cup",
    "stratum_pairing",
    "vertex_invariant_p1",
    "P1",
    "P1XP1",
    "P2",
    "TargetSpace",
    "get_target",
    "wdvv_number",
    "VerificationReport",
    "verify_product",
]
