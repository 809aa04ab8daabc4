"""配置模块"""
from src.config.settings import Config, Settings

__all__ = ["Config", "Settings"]
