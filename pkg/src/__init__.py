"""二次 del Pezzo 曲面计算工具 - W(E7) 类表、zeta 函数与有限域构造"""

__version__ = "1.0.0"
