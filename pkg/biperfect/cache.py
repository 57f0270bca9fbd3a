"""
晶体缓存管理器
按内容寻址的目录 <root>/<kind>/<sha256>.json，条目为 {key, payload, sha256}
"""

import hashlib
import json
import os
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from .common import DEFAULT_CACHE_DIR, SCHEMA_VERSION, CacheLockTimeout, logger
from .file_manager import FileManager, dump_json


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CrystalCache:
    """
    缓存管理类

    :param root: 缓存根目录
    :param enabled: 关闭时 get 总是未命中，put 不写盘
    :param lock_timeout: 获取写锁的超时时间（秒）
    :param schema_version: 版本号，变更后旧条目全部失效
    """

    def __init__(self, root: str = DEFAULT_CACHE_DIR, enabled: bool = True,
                 lock_timeout: float = 10.0, schema_version: int = SCHEMA_VERSION):
        self.root = Path(root).expanduser()
        self.enabled = enabled
        self.lock_timeout = lock_timeout
        self.schema_version = schema_version

    def make_key(self, kind: str, cartan: str, params: Dict[str, Any]) -> Dict[str, Any]:
        return {"schema": self.schema_version, "cartan": cartan, "kind": kind, "params": params}

    def entry_path(self, kind: str, cartan: str, params: Dict[str, Any]) -> Path:
        key_text = dump_json(self.make_key(kind, cartan, params))
        return self.root / kind / f"{_digest(key_text)}.json"

    def _evict(self, path: Path, reason: str):
        logger.warning(f"缓存条目 {path.name} 已损坏（{reason}），删除后重新计算")
        try:
            path.unlink()
        except OSError as e:
            logger.error(f"删除缓存条目失败: {e}")

    def get(self, kind: str, cartan: str, params: Dict[str, Any]) -> Optional[Any]:
        """
        读取缓存，校验键与内容哈希

        :return: 缓存的数据，未命中或损坏时为 None
        """
        if not self.enabled:
            return None
        path = self.entry_path(kind, cartan, params)
        if not path.exists():
            return None

        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            self._evict(path, f"无法解析: {e}")
            return None

        if not isinstance(entry, dict) or entry.get("key") != self.make_key(kind, cartan, params):
            self._evict(path, "键不匹配")
            return None
        if entry.get("sha256") != _digest(dump_json(entry.get("payload"))):
            self._evict(path, "内容哈希不匹配")
            return None

        logger.info(f"缓存命中: {kind} {cartan}")
        return entry["payload"]

    @contextmanager
    def _lock(self, path: Path):
        lock_path = path.with_suffix(".lock")
        deadline = time.monotonic() + self.lock_timeout
        while True:
            try:
                fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                break
            except FileExistsError:
                if time.monotonic() >= deadline:
                    logger.error(f"获取缓存锁超时: {lock_path}")
                    raise CacheLockTimeout(f"{self.lock_timeout} 秒内未能获取缓存锁 {lock_path}")
                time.sleep(0.05)
        try:
            os.close(fd)
            yield
        finally:
            try:
                lock_path.unlink()
            except FileNotFoundError:
                pass

    def put(self, kind: str, cartan: str, params: Dict[str, Any], payload: Any) -> Optional[Path]:
        """
        写入缓存（单写者锁，先写临时文件再替换）

        :return: 条目路径，缓存关闭时为 None
        """
        if not self.enabled:
            return None
        path = self.entry_path(kind, cartan, params)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "key": self.make_key(kind, cartan, params),
            "payload": payload,
            "sha256": _digest(dump_json(payload)),
        }
        with self._lock(path):
            temp_path = path.with_suffix(".tmp")
            if not FileManager.save_text_file(dump_json(entry), str(temp_path)):
                return None
            os.replace(temp_path, path)
        logger.debug(f"缓存已写入: {path}")
        return path

    def get_or_compute(self, kind: str, cartan: str, params: Dict[str, Any],
                       compute: Callable[[], Any]) -> Any:
        """命中则返回缓存，否则计算并写入"""
        payload = self.get(kind, cartan, params)
        if payload is None:
            payload = compute()
            self.put(kind, cartan, params, payload)
        return payload
