"""核心计算模块"""
from src.core.picard import DivisorClass, exceptional_classes, roots
from src.core.weyl import Isometry, enumerate_group
from src.core.finite_field import FieldSpec, FiniteField
from src.core.projective import ProjPoint, ClosedPoint, is_general_position
from src.core.config_search import search_blowup_config, Witness, Exhausted
from src.core.conic_bundle import CBClass, WD6Element

__all__ = [
    "DivisorClass", "exceptional_classes", "roots",
    "Isometry", "enumerate_group",
    "FieldSpec", "FiniteField",
    "ProjPoint", "ClosedPoint", "is_general_position",
    "search_blowup_config", "Witness", "Exhausted",
    "CBClass", "WD6Element",
]
