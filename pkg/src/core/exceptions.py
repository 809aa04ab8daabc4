"""异常定义 - 所有模块共用的错误层级"""
from typing import Any, Dict, Optional


class DelPezzoError(Exception):
    """所有业务异常的基类"""


class MalformedClassError(DelPezzoError):
    """除子类不满足格条件（例如伴随公式给出奇数）"""


class NotAnIsometryError(DelPezzoError):
    """矩阵不保持相交形式或不固定 K"""


class BudgetExceededError(DelPezzoError):
    """超出资源预算（群枚举的内存预算或搜索的节点上限）

    Attributes:
        progress: 中断时的进度信息（已完成层数、已发现元素数等）
    """

    def __init__(self, message: str, progress: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.progress = progress or {}


class FingerprintCollisionError(DelPezzoError):
    """两个不共轭的类具有相同的指纹"""

    def __init__(self, message: str, class_ids: tuple = ()):
        super().__init__(message)
        self.class_ids = class_ids


class InternalConsistencyError(DelPezzoError):
    """计算结果与参考数据或内部不变量矛盾"""


class InvalidFieldError(DelPezzoError):
    """域参数非法：p 非素数、模多项式可约、q 不是素数幂等"""


class SizeCapError(DelPezzoError):
    """超出可枚举规模上限"""


class GeometryInputError(DelPezzoError):
    """几何输入非法：重复点、点不在曲线/曲面上、点是奇点等"""


class UnsupportedPatternError(DelPezzoError):
    """不支持的闭点次数模式"""


class InvalidElementError(DelPezzoError):
    """W(D6) 元素非法（翻转集大小为奇数或文本格式错误）"""


class VerdictConsistencyError(DelPezzoError):
    """计算证书与定理数据不一致"""
