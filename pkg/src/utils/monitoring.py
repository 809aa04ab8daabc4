"""性能监控 - 记录各计算阶段（群枚举、类标记、搜索）的耗时"""

import time
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, asdict
from datetime import datetime
from pathlib import Path
from threading import Lock
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


@dataclass
class StageMetrics:
    """单个阶段的度量"""
    total_calls: int = 0
    failed_calls: int = 0
    total_duration: float = 0.0
    min_duration: float = float('inf')
    max_duration: float = 0.0
    last_error: Optional[str] = None

    @property
    def avg_duration(self) -> float:
        done = self.total_calls - self.failed_calls
        return self.total_duration / done if done else 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["min_duration"] = None if self.min_duration == float('inf') else round(self.min_duration, 3)
        data["max_duration"] = round(self.max_duration, 3)
        data["total_duration"] = round(self.total_duration, 3)
        data["avg_duration"] = round(self.avg_duration, 3)
        return data


class PerformanceMonitor:
    """阶段耗时监控器

    线程安全：使用 Lock 保护共享状态；persist=True 时每次记录后写入 stage_metrics.json
    """

    def __init__(self, metrics_dir: Optional[str] = None, persist: bool = False):
        self.metrics_dir = Path(metrics_dir) if metrics_dir else None
        self.persist = persist and self.metrics_dir is not None
        self._stages: Dict[str, StageMetrics] = {}
        self._lock = Lock()

    def record(self, stage: str, duration: float, error: Optional[str] = None):
        """记录一次阶段执行"""
        with self._lock:
            m = self._stages.setdefault(stage, StageMetrics())
            m.total_calls += 1
            if error is not None:
                m.failed_calls += 1
                m.last_error = error
            else:
                m.total_duration += duration
                m.min_duration = min(m.min_duration, duration)
                m.max_duration = max(m.max_duration, duration)
        if self.persist:
            self._save()

    @contextmanager
    def track_stage(self, stage: str):
        """上下文管理器：计时并记录一个阶段，异常照常抛出"""
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            self.record(stage, time.perf_counter() - start, error=f"{type(e).__name__}: {e}")
            raise
        duration = time.perf_counter() - start
        self.record(stage, duration)
        logger.info(f"[{stage}] 完成，耗时 {duration:.2f}s")

    def get_stage(self, stage: str) -> Optional[StageMetrics]:
        with self._lock:
            return self._stages.get(stage)

    def summary(self) -> Dict[str, Any]:
        with self._lock:
            return {name: m.to_dict() for name, m in self._stages.items()}

    def _save(self):
        """保存度量数据"""
        metrics_file = self.metrics_dir / "stage_metrics.json"
        try:
            self.metrics_dir.mkdir(parents=True, exist_ok=True)
            data = {"updated_at": datetime.now().isoformat(), "stages": self.summary()}
            with open(metrics_file, 'w', encoding='utf-8') as f:
                json.dump(data, f, ensure_ascii=False, indent=2)
        except OSError as e:
            logger.error(f"保存度量数据失败: {e}")


# 全局监控实例
_monitor: Optional[PerformanceMonitor] = None


def get_monitor() -> PerformanceMonitor:
    """获取全局监控实例"""
    global _monitor
    if _monitor is None:
        _monitor = PerformanceMonitor()
    return _monitor


def configure_monitor(metrics_dir: str, persist: bool = True) -> PerformanceMonitor:
    """替换全局监控实例（CLI 启动时调用）"""
    global _monitor
    _monitor = PerformanceMonitor(metrics_dir, persist=persist)
    return _monitor
