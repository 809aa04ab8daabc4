"""工具模块"""
from src.utils.logger import get_logger, setup_logging
from src.utils.monitoring import get_monitor

__all__ = ["get_logger", "setup_logging", "get_monitor"]
