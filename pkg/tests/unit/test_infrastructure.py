"""配置、日志、性能监控与异常层级单元测试"""

import json
import logging

import pytest

from src.config.settings import Config
from src.core.exceptions import (
    BudgetExceededError,
    DelPezzoError,
    GeometryInputError,
    InvalidFieldError,
    VerdictConsistencyError,
)
from src.utils.logger import get_logger, setup_logging
from src.utils.monitoring import PerformanceMonitor, configure_monitor, get_monitor


class TestConfig:
    """配置校验"""

    def test_defaults_valid(self):
        """测试默认配置通过校验"""
        assert Config.validate()

    @pytest.mark.parametrize("name,value", [
        ("MEMORY_BUDGET", 1024),
        ("THREADS", 0),
        ("FIELD_SIZE_CAP", 1),
    ])
    def test_invalid_values(self, monkeypatch, name, value):
        """测试非法配置"""
        monkeypatch.setattr(Config, name, value)
        with pytest.raises(ValueError):
            Config.validate()


class TestLogging:
    """日志配置"""

    def test_handlers_not_duplicated(self):
        """测试重复调用不会重复添加 handler"""
        logger = setup_logging("dp2_test_logger", level="DEBUG")
        count = len(logger.handlers)
        again = setup_logging("dp2_test_logger", level="WARNING")
        assert again is logger
        assert len(again.handlers) == count
        assert again.level == logging.WARNING

    def test_log_file(self, tmp_path):
        """测试写入日志文件"""
        log_file = tmp_path / "logs" / "run.log"
        logger = setup_logging("dp2_file_logger", level="INFO", log_file=str(log_file))
        logger.info("类表已加载")
        for handler in logger.handlers:
            handler.flush()
        assert "类表已加载" in log_file.read_text(encoding="utf-8")

    def test_get_logger_level(self):
        """测试字符串级别解析"""
        assert get_logger("dp2_level_logger", "error").level == logging.ERROR


class TestMonitoring:
    """阶段耗时监控"""

    def test_track_stage(self):
        """测试成功与失败的阶段都被记录"""
        monitor = PerformanceMonitor()
        with monitor.track_stage("search"):
            pass
        with pytest.raises(RuntimeError):
            with monitor.track_stage("search"):
                raise RuntimeError("boom")
        stage = monitor.get_stage("search")
        assert stage.total_calls == 2
        assert stage.failed_calls == 1
        assert stage.last_error == "RuntimeError: boom"
        assert monitor.summary()["search"]["total_calls"] == 2

    def test_unknown_stage(self):
        """测试未记录的阶段"""
        assert PerformanceMonitor().get_stage("verdict") is None

    def test_persist(self, tmp_path):
        """测试度量数据写入 stage_metrics.json"""
        monitor = configure_monitor(str(tmp_path))
        try:
            monitor.record("enumerate", 1.5)
            data = json.loads((tmp_path / "stage_metrics.json").read_text(encoding="utf-8"))
            assert data["stages"]["enumerate"]["total_duration"] == 1.5
            assert get_monitor() is monitor
        finally:
            configure_monitor(str(tmp_path), persist=False)

    def test_no_persist_without_dir(self):
        """测试没有目录时不持久化"""
        assert not PerformanceMonitor(persist=True).persist


class TestExceptions:
    """异常层级"""

    @pytest.mark.parametrize("exc", [GeometryInputError, InvalidFieldError, VerdictConsistencyError])
    def test_hierarchy(self, exc):
        """测试所有领域异常都继承自 DelPezzoError"""
        assert issubclass(exc, DelPezzoError)

    def test_budget_progress(self):
        """测试预算异常携带进度"""
        err = BudgetExceededError("超出", progress={"nodes_visited": 3})
        assert err.progress == {"nodes_visited": 3}
        assert BudgetExceededError("超出").progress == {}
