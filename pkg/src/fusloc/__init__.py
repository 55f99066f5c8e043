"""fusloc: exact computation with fusion systems and localities at desk scale."""

from .errors import (FuslocError, ClosureTooLarge, NotSubgroup, NoSolution,
                     CocycleNotClosed, CentricDecompositionFailure,
                     LiftingObstruction)
from .intlin import smith_solve, smith_normal_form, row_hnf
from .groups import (Permutation, FiniteGroup, GroupHom, FinAb, AbHom,
                     generate_group, subgroups, normalizer, centralizer,
                     center, abelianization, abelian_quotient, transfer,
                     cotransfer, direct_product, quotient_group,
                     DEFAULT_CAP)

__version__ = '0.1.0'
