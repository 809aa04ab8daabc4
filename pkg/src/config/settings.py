"""配置管理模块"""
import os
from dotenv import load_dotenv

# 加载环境变量
load_dotenv()


class Settings:
    """环境设置类 - 日志等运行环境相关配置"""

    # 环境标识
    ENV = os.getenv("ENV", "development")
    DEBUG = os.getenv("DEBUG", "false").lower() == "true"

    # 日志配置
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT = os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    LOG_FILE = os.getenv("LOG_FILE", "").strip() or None

    # 长时间计算是否显示进度条
    SHOW_PROGRESS = os.getenv("DP2_PROGRESS", "true").lower() == "true"


class Config:
    """计算相关配置，均可由环境变量或命令行参数覆盖"""

    # 类表缓存目录
    CACHE_DIR = os.getenv("DP2_CACHE_DIR", "./cache")

    # 群枚举内存预算（字节），默认 1 GiB
    MEMORY_BUDGET = int(os.getenv("DP2_MEMORY_BUDGET", str(1 << 30)))
    MIN_MEMORY_BUDGET = 256 * (1 << 20)

    # 判定表搜索使用的线程数
    THREADS = int(os.getenv("DP2_THREADS", "1"))

    # 有限域 / 点集可枚举规模上限
    FIELD_SIZE_CAP = int(os.getenv("DP2_FIELD_SIZE_CAP", str(1 << 20)))

    # 见证文件与度量数据目录
    WITNESS_DIR = os.getenv("DP2_WITNESS_DIR", "./witnesses")
    METRICS_DIR = os.getenv("DP2_METRICS_DIR", "./logs")

    # 判定表覆盖的 q 上限
    MAX_VERDICT_Q = int(os.getenv("DP2_MAX_VERDICT_Q", "13"))

    @classmethod
    def validate(cls):
        """验证配置"""
        if cls.MEMORY_BUDGET < cls.MIN_MEMORY_BUDGET:
            raise ValueError(
                f"DP2_MEMORY_BUDGET 过小: {cls.MEMORY_BUDGET}，至少需要 {cls.MIN_MEMORY_BUDGET} 字节"
            )
        if cls.THREADS < 1:
            raise ValueError(f"DP2_THREADS 必须为正整数，当前为 {cls.THREADS}")
        if cls.FIELD_SIZE_CAP < 2:
            raise ValueError(f"DP2_FIELD_SIZE_CAP 非法: {cls.FIELD_SIZE_CAP}")
        return True
