"""
双完美基工作台配置文件
统一管理默认类型、计算参数与缓存目录
"""

from pathlib import Path
from typing import Any, Dict

from dotenv import dotenv_values

from biperfect.common import (DEFAULT_CACHE_DIR, DEFAULT_CONFIG_FILE, DEFAULT_EXTRA_PRIMES,
                              DEFAULT_MAX_WORKERS, SCHEMA_VERSION)
from biperfect.rootdata import MAX_ENUMERATION_RANK, MAX_KOSTANT_HEIGHT

# 配置文件中的键 -> (配置段, 字段, 类型)
SETTING_KEYS = {
    "default_type": ("defaults", "type", str),
    "default_rank": ("defaults", "rank", int),
    "default_format": ("defaults", "format", str),
    "max_workers": ("compute", "max_workers", int),
    "primes_extra": ("compute", "primes_extra", int),
    "cache_enabled": ("cache", "enabled", bool),
    "cache_dir": ("cache", "dir", str),
    "lock_timeout": ("cache", "lock_timeout", float),
}


def _parse_bool(value: str) -> bool:
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"无法解析布尔值: {value}")


class Config:
    """配置管理类"""

    def __init__(self):
        # 命令行缺省参数
        self.defaults = {
            "type": "A",
            "rank": 2,
            "format": "json",
        }

        # 计算参数
        self.compute = {
            "max_workers": DEFAULT_MAX_WORKERS,
            "primes_extra": DEFAULT_EXTRA_PRIMES,
            "max_enumeration_rank": MAX_ENUMERATION_RANK,
            "max_kostant_height": MAX_KOSTANT_HEIGHT,
        }

        # 晶体缓存
        self.cache = {
            "enabled": True,
            "dir": DEFAULT_CACHE_DIR,
            "lock_timeout": 10.0,
            "schema_version": SCHEMA_VERSION,
        }

    @property
    def cache_path(self) -> Path:
        """获取缓存根目录的Path对象"""
        return Path(self.cache["dir"]).expanduser()

    @property
    def default_cartan(self) -> str:
        """缺省的Cartan类型字符串，如 A2"""
        return f"{self.defaults['type']}{self.defaults['rank']}"

    def update_setting(self, key: str, value: Any):
        """按配置文件中的键更新设置"""
        if key not in SETTING_KEYS:
            raise ValueError(f"未知的配置键: {key}")
        section, field, kind = SETTING_KEYS[key]
        if kind is bool:
            value = value if isinstance(value, bool) else _parse_bool(value)
        else:
            value = kind(value)
        if kind is int and value < 1 and key != "primes_extra":
            raise ValueError(f"{key} 必须为正整数")
        getattr(self, section)[field] = value

    def update_cache_dir(self, new_dir: str):
        """更新缓存根目录"""
        self.cache["dir"] = new_dir

    def load_conf_file(self, file_path: str = DEFAULT_CONFIG_FILE) -> bool:
        """
        读取 key = value 格式的配置文件

        :param file_path: 文件路径
        :return: 文件是否存在
        """
        if not Path(file_path).exists():
            return False
        for key, value in dotenv_values(file_path).items():
            if value is not None:
                self.update_setting(key, value)
        return True

    def to_conf_text(self) -> str:
        """导出为 key = value 文本"""
        lines = []
        for key, (section, field, _) in SETTING_KEYS.items():
            value = getattr(self, section)[field]
            if isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        """将配置转换为字典格式"""
        return {
            "defaults": self.defaults.copy(),
            "compute": self.compute.copy(),
            "cache": self.cache.copy(),
        }

    def from_dict(self, config_dict: Dict[str, Any]):
        """从字典格式加载配置"""
        if "defaults" in config_dict:
            self.defaults.update(config_dict["defaults"])

        if "compute" in config_dict:
            self.compute.update(config_dict["compute"])

        if "cache" in config_dict:
            self.cache.update(config_dict["cache"])


# 创建全局配置实例
config = Config()


# 便捷函数
def get_config() -> Config:
    """获取全局配置实例"""
    return config


def get_cache_path() -> Path:
    """获取缓存根目录"""
    return config.cache_path


def get_max_workers() -> int:
    """获取并行线程数"""
    return config.compute["max_workers"]


def get_default_cartan() -> str:
    """获取缺省Cartan类型"""
    return config.default_cartan
