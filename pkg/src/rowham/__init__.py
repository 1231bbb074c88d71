"""Row-Hamiltonian Latin squares from quadratic orthomorphisms.

Construction, conjugate/permutation machinery, a GF(2) link-relation
reduction pipeline with runtime-checked invariants, exact censuses with
golden reference data, character-sum witnesses, bipartite
1-factorisations, and the two-identity loop varieties.
"""

from .zp_core import PrimeContext, anchor_element, precedes, quadratic_character
from .orthomorphism import (
    CyclotomicMap,
    QuadraticMap,
    is_orthomorphism,
    is_quadratic_orthomorphism_pair,
)
from .latin import (
    LatinSquare,
    conjugate,
    cycle_structure,
    from_first_row,
    from_orthomorphism,
    is_row_hamiltonian,
    is_row_hamiltonian_quadratic,
    named_square,
    nu,
    nu_four_square,
    nu_quadratic,
    row_permutation,
    column_permutation,
    symbol_permutation,
)
from .linkreduce import (
    LinkMatrix,
    ReductionInvariantError,
    TranspositionFamily,
    build_link_matrix,
    gf2_determinant,
    ncycle_by_determinant,
    principal_submatrix,
    run_pipeline,
    wedge,
)
from .spectrum import (
    CensusRow,
    a_one_minus_a_search,
    load_golden,
    self_inverse_census,
    valid_pairs,
    verify_known_examples,
)
from .charsum import (
    ZpPolynomial,
    character_sum,
    check_quadratic_identity,
    check_weil_bound,
    q_sum_lower_bound,
    witness_A,
    witness_s0c,
)
from .onefact import BipartiteFactorisation, is_perfect, to_factorisation
from .variety import (
    Loop,
    Quasigroup,
    anti_associativity_probe,
    divides_lcm_below,
    from_square,
    principal_loop_isotope,
    satisfies_variety_identities,
    variety_loop,
)

__version__ = "0.1.0"
