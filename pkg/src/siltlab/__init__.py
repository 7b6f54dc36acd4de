"""Two-term silting objects, support tau-tilting pairs and their reductions over bound quiver algebras."""

from .algebra import Algebra, build_from_quiver, build_from_structure_constants, corpus_algebra, corpus_names, load_algebra
from .complexes import ProjComplex, hom_k, hom_k_dim
from .modules import Representation, enumerate_stau, hom_dim, tau
from .silting import bongartz, co_bongartz, is_presilting, is_silting, leq, mutate, to_stau_pair, from_stau_pair

__version__ = "0.1.0"

__all__ = [
    "Algebra", "ProjComplex", "Representation", "bongartz", "build_from_quiver", "build_from_structure_constants",
    "co_bongartz", "corpus_algebra", "corpus_names", "enumerate_stau", "from_stau_pair", "hom_dim", "hom_k",
    "hom_k_dim", "is_presilting", "is_silting", "leq", "load_algebra", "mutate", "tau", "to_stau_pair",
]
