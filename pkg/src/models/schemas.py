"""Pydantic 数据模型 - 所有 JSON / CSV 输出的序列化格式"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Minimality(str, Enum):
    """极小性类型"""
    NON_MINIMAL = "NonMinimal"
    MINIMAL_CONIC_BUNDLE = "MinimalConicBundle"
    MINIMAL_PICARD_ONE = "MinimalPicardOne"


class VerdictSource(str, Enum):
    """存在性结论的来源"""
    THEOREM = "Theorem"
    COMPUTED_WITNESS = "ComputedWitness"
    COMPUTED_EXHAUSTION = "ComputedExhaustion"
    COMPUTED_POINT_COUNT = "ComputedPointCount"


class ClassRow(BaseModel):
    """类表中的一行"""
    id: int = Field(..., ge=1, le=60)
    carter_label: str
    order: int = Field(..., ge=1)
    eigenvalues: List[str] = Field(..., description="K^⊥ 上的 7 个特征值，记为 'n^k' 即 e^{2πik/n}")
    rho: int = Field(..., ge=1, le=8)
    geiser: int = Field(..., ge=1, le=60)
    minimality: Minimality
    class_size: int = Field(..., ge=1)
    centralizer_order: int = Field(..., ge=1)
    fingerprint: str
    representative: List[List[int]] = Field(..., description="代表元的 8×8 矩阵（作用于列向量）")

    @field_validator('eigenvalues')
    @classmethod
    def validate_eigenvalues(cls, v):
        if len(v) != 7:
            raise ValueError('K^⊥ 上必须恰有 7 个特征值')
        return v

    @field_validator('representative')
    @classmethod
    def validate_representative(cls, v):
        if len(v) != 8 or any(len(row) != 8 for row in v):
            raise ValueError('代表元必须是 8×8 矩阵')
        return v

    @model_validator(mode='after')
    def validate_rho(self):
        ones = sum(1 for e in self.eigenvalues if e == "1^0")
        if self.rho != 1 + ones:
            raise ValueError(f'rho={self.rho} 与特征值 1 的重数 {ones} 不符')
        return self


class ClassTableFile(BaseModel):
    """类表缓存文件"""
    format_version: int
    group_order: int
    class_count: int
    cyclic_subgroup_classes: int
    fingerprint_collisions: List[List[int]] = Field(default_factory=list)
    records: List[ClassRow]


class ZetaReport(BaseModel):
    """zeta 命令的输出"""
    class_id: int = Field(..., ge=1, le=60)
    q: int = Field(..., ge=2)
    P: List[int] = Field(..., description="P(t) 的系数 c0..c8")
    N: List[int] = Field(..., description="N_1..N_dmax")
    negative_at: Optional[int] = None

    @field_validator('P')
    @classmethod
    def validate_p(cls, v):
        if len(v) != 9 or v[0] != 1:
            raise ValueError('P(t) 必须是 8 次且常数项为 1')
        return v


class WitnessFile(BaseModel):
    """配置搜索的见证文件"""
    q: int
    p: int
    m: int = Field(..., description="工作域 F_{p^m} 的扩张次数")
    modulus: List[int] = Field(..., description="工作域模多项式系数，从高次到低次")
    pattern: str
    points: List[List[List[List[int]]]] = Field(
        ..., description="每个闭点的几何点列表；坐标为工作域元素的系数列表（低次在前）"
    )
    conics: Optional[List[str]] = None


class ExhaustionReport(BaseModel):
    """搜索空间穷尽的证书"""
    q: int
    pattern: str
    exhausted: bool = True
    complete: bool = Field(..., description="是否覆盖了完整的（规范化后的）配置空间")
    normalization: str
    nodes_visited: int


class VerdictRow(BaseModel):
    """判定表中的一行"""
    class_id: int
    q: int
    verdict: str
    source: VerdictSource
    item: str = Field(..., description="定理数据中的条目编号")
    detail: Optional[str] = None
    witness_path: Optional[str] = None

    @model_validator(mode='after')
    def validate_witness(self):
        if self.source == VerdictSource.COMPUTED_WITNESS and not self.witness_path:
            raise ValueError('ComputedWitness 必须附带见证文件路径')
        return self


class EckardtReport(BaseModel):
    """立方曲面上一点的 Eckardt 分析"""
    point: str
    tangent_plane: List[str]
    lines_through_point: List[str]
    is_eckardt: bool


class SingularityReport(BaseModel):
    """平面曲线在一点的奇点分析"""
    point: str
    is_singular: bool
    multiplicity: int
    tangent_cone: List[str]
    tangent_cone_factors: List[str]
    is_node: bool
