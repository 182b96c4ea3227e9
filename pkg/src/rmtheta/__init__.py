"""rmtheta: exact theta relations for abelian surfaces with sqrt(3)
real multiplication, with the full genus-2 curve pipeline over finite
fields."""

from .field import (Field, FieldElement, make_prime_field, extend,
                    is_probable_prime)
from .indices import (admissible_triples, apply_rm_matrix, canonical_index,
                      equivalent_triple_pairs, is_admissible_triple,
                      neg_index, triple_key)
from .relations import (Relation, RelationSet, VerificationReport,
                        humbert_quadrics, mumford_relations,
                        parse_relations, relation_set, rm_bilinear_relations,
                        rm_relations, serialize_relations, span_contains,
                        span_rank, split_product_relation,
                        split_square_relations, verify)
from .pipeline import (BranchPoints, Decision, Level2Data, RosenhainCurve,
                       SearchConfig, ThetaPoint2, ThetaPoint4,
                       is_elliptic_theta_null, level2_point_from_data,
                       level2_squares_from_thomae, level2_to_level4,
                       level4_to_level2, normalize_branch_sextet,
                       product_point, rm_test, rosenhain_from_level2,
                       thomae_squares)

__version__ = "1.0.0"
