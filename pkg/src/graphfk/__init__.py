"""Filtered ordered K-theory of graph algebras and stable isomorphism tests."""

from .intmat import IntMatrix, smith_normal_form
from .abelian import FgAbGroup, GroupHom, cokernel
from .graph import Graph, hereditary_saturated_subsets, condition_K, class_Cn_membership
from .ktheory import filtered_k_theory, case2_diagram, build_diagram, k_pair, six_term

__version__ = "0.1.0"
