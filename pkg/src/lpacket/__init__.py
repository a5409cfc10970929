"""Exact combinatorics of unramified L-packets."""
from __future__ import annotations

from .affine import (
    AffineTransform,
    Alcove,
    AlcovePoint,
    OmegaElement,
    build_alcove,
    hyperspecial_vertices,
    omega_group,
    reduce_to_alcove,
)
from .lattice import (
    FiniteAbelianGroup,
    Lattice,
    LatticeMap,
    coinvariants_mod_torsion,
    cokernel_torsion,
    fixed_sublattice,
    smith_normal_form,
)
from .packet import (
    CocycleCoefficient,
    PacketSetting,
    QmodZ,
    cocycle,
    keys_base,
    packet_setting,
    packet_table,
    pairing,
    verify_main_theorem,
    zeta,
)
from .rgroup import RGroupData, levi_datum, levi_subset, sc_comparison, stabilizer
from .rootdatum import (
    BasedRootDatum,
    DiagramAutomorphism,
    WeylElement,
    dual_datum,
    reduced_word,
    relative_datum,
    relative_weyl_check,
    standard_datum,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "Alcove",
    "AlcovePoint",
    "BasedRootDatum",
    "CocycleCoefficient",
    "DiagramAutomorphism",
    "FiniteAbelianGroup",
    "Lattice",
    "LatticeMap",
    "OmegaElement",
    "PacketSetting",
    "QmodZ",
    "RGroupData",
    "WeylElement",
    "build_alcove",
    "cocycle",
    "coinvariants_mod_torsion",
    "cokernel_torsion",
    "dual_datum",
    "fixed_sublattice",
    "hyperspecial_vertices",
    "keys_base",
    "levi_datum",
    "levi_subset",
    "omega_group",
    "packet_setting",
    "packet_table",
    "pairing",
    "reduce_to_alcove",
    "reduced_word",
    "relative_datum",
    "relative_weyl_check",
    "sc_comparison",
    "smith_normal_form",
    "stabilizer",
    "standard_datum",
    "verify_main_theorem",
    "zeta",
]
