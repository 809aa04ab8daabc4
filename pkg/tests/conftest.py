"""测试公共夹具：W(E7) 类表只构建一次，缓存到临时目录"""

import pytest

from src.services.class_table import ClassTable, set_class_table


@pytest.fixture(scope="session")
def class_table_cache(tmp_path_factory):
    """类表缓存目录"""
    return tmp_path_factory.mktemp("class_table_cache")


@pytest.fixture(scope="session")
def class_table(class_table_cache):
    """完整的 60 行类表（首次构建约需数分钟）"""
    table = ClassTable.load_or_build(str(class_table_cache), show_progress=False)
    set_class_table(table)
    yield table
    set_class_table(None)
