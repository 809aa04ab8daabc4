"""服务层模块"""
from src.services.class_table import ClassTable, get_class_table
from src.services.verdict import VerdictService

__all__ = ["ClassTable", "get_class_table", "VerdictService"]
