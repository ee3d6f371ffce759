"""kei: computational algebra for finite involutory quandles.

Construction, validation and structural analysis of involutory quandles
(idempotent, left-distributive tables whose left translations are
involutions), knot quandle completion from presentations, and isomorph-free
enumeration of the connected ones at small orders.
"""

__version__ = "0.1.0"

from .quandle import (
    AxiomViolation,
    CongruencePartition,
    IsoCertificate,
    MagmaTable,
    MalformedTable,
    PropertyRecord,
    Quandle,
    are_isomorphic,
    basic_properties,
    canonical_form,
    congruences,
    is_simple_lattice,
    orbit_decomposition,
    quandle_from_rows,
    relabel,
    subquandle_generated,
    validate,
)
from .permgroup import GroupTable, Overflow, PermGroup, group_catalog, group_predicates
from .constructions import (
    BilinearForm,
    EmptyQuandle,
    LorentzPoint,
    ToleranceViolation,
    abelian_core,
    conj_involutions,
    core_of_group,
    dihedral_quandle,
    hyperboloid_op,
    identity_form,
    reflection_quandle,
)
from .analysis import AnalysisReport, analyze, cycle_profile, dis, is_connected, lmlt
from .knot import (
    CompletionOverflow,
    CrossingList,
    Presentation,
    Word,
    complete,
    crossings_to_presentation,
    normalize_word,
    parse_crossings,
    parse_presentation,
    unknot_test,
)
from .enumeration import (
    CountsRow,
    Envelope,
    abelian_groups,
    counts,
    enumerate_all,
    enumerate_connected,
    envelope_of,
    is_affine,
    quandle_from_envelope,
)

__all__ = [name for name in dir() if not name.startswith("_")]
