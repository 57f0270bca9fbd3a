"""
公共配置和工具函数
"""
import logging
import os
from pathlib import Path

from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

# 默认配置
DEFAULT_CACHE_DIR = os.getenv("BIPERFECT_CACHE_DIR", str(Path.home() / ".cache" / "biperfect"))
DEFAULT_CONFIG_FILE = os.getenv("BIPERFECT_CONFIG", "workbench.conf")
DEFAULT_MAX_WORKERS = int(os.getenv("BIPERFECT_MAX_WORKERS", "4"))
# 插值校验时额外使用的素数个数
DEFAULT_EXTRA_PRIMES = int(os.getenv("BIPERFECT_EXTRA_PRIMES", "2"))

# JSON 输出的模式版本号，变更格式时递增
SCHEMA_VERSION = 1


class UnsupportedCartanTypeError(ValueError):
    """不支持的Cartan类型（未知字母或非单边型的晶体请求）"""


class PoleError(ZeroDivisionError):
    """有理函数在极点处求值"""

    def __init__(self, message: str, factor=None):
        super().__init__(message)
        self.factor = factor


class InterpolationError(RuntimeError):
    """计数多项式插值不一致"""


class FieldStabilityError(RuntimeError):
    """子模集合在不同有限域上不一致"""


class CacheLockTimeout(TimeoutError):
    """缓存锁获取超时"""


def setup_logging(level=logging.INFO):
    """配置日志系统"""
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s'
    )
    return logging.getLogger(__name__)

# 创建默认日志记录器
logger = setup_logging()
