"""Exact computations with partial flag manifolds P^J(K) over semifields."""

from .semifield import CIRC, ONE, RATIONAL, TROPICAL, Val, get_semifield, to_one_hom
from .cartan import cartan
from .based import BasedModule, GammaTable, SemiVector
from .datagen import generate, get_store
from .monoid import parse_word, word_apply
from .flags import FlagPoint, act, basepoint, check_consistency, expand, map_semifield, normalize, to_classical
from .semiring import MElem, char_from_point, m_mul, point_from_char
from .weyl import build_weyl
from .explorer import conjecture_check, enumerate_one, fiber_sample

__version__ = "0.1.0"
