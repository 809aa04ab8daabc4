"""数据模型模块"""
from src.models.schemas import ClassRow, VerdictRow, WitnessFile, ZetaReport

__all__ = ["ClassRow", "VerdictRow", "WitnessFile", "ZetaReport"]
