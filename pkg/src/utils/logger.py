"""日志工具模块"""
import logging
import sys
from pathlib import Path
from typing import Optional, Union

from src.config.settings import Settings

# 默认日志格式
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_LEVELS = {"DEBUG": logging.DEBUG, "INFO": logging.INFO, "WARNING": logging.WARNING,
           "ERROR": logging.ERROR, "CRITICAL": logging.CRITICAL}


def _resolve_level(level: Union[int, str, None]) -> int:
    if level is None:
        level = Settings.LOG_LEVEL
    if isinstance(level, str):
        return _LEVELS.get(level.upper(), logging.INFO)
    return level


def setup_logging(
    name: str = "src",
    level: Union[int, str, None] = None,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None
) -> logging.Logger:
    """配置日志系统 - 控制台输出到 stderr，可选写入文件

    计算结果走 stdout，日志统一走 stderr，保证 JSON/CSV 输出可直接重定向。

    Args:
        name: logger 名称（默认 "src"，覆盖整个包）
        level: 日志级别，None 时读取 Settings.LOG_LEVEL
        log_file: 日志文件路径（None 时读取 Settings.LOG_FILE）
        format_string: 日志格式

    Returns:
        配置好的 logger 实例
    """
    logger = logging.getLogger(name)
    resolved = _resolve_level(level)
    logger.setLevel(resolved)

    # 避免重复添加 handler
    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(resolved)
        return logger

    formatter = logging.Formatter(format_string or Settings.LOG_FORMAT or DEFAULT_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(resolved)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = log_file or Settings.LOG_FILE
    if log_file:
        try:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setLevel(resolved)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"无法创建日志文件 {log_file}: {e}")

    return logger


def get_logger(name: str, level: Union[int, str, None] = None) -> logging.Logger:
    """获取 logger（不配置文件输出）

    Args:
        name: logger 名称
        level: 日志级别

    Returns:
        配置好的 logger 实例
    """
    return setup_logging(name, level, None, None)
