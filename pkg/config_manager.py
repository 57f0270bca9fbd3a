"""
配置管理工具
命令行与交互两种方式查看、修改、检查工作台配置
"""

import argparse
import os
import shlex
from pathlib import Path
from typing import Callable, Dict, List, Optional

from biperfect.common import DEFAULT_CONFIG_FILE
from biperfect.rootdata import CartanData, longest_element_word, opposition, positive_roots
from config import Config, SETTING_KEYS, get_config


def save_config_to_file(config: Config, file_path: str = DEFAULT_CONFIG_FILE) -> bool:
    """将配置写成 key = value 文件"""
    try:
        target = Path(file_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(config.to_conf_text(), encoding='utf-8')
    except OSError as e:
        print(f"❌ 保存配置失败: {e}")
        return False
    print(f"✅ 配置已写入: {file_path}")
    return True


def load_config_from_file(config: Config, file_path: str = DEFAULT_CONFIG_FILE, quiet: bool = False) -> bool:
    """读取 key = value 文件；文件缺失时保留当前配置"""
    try:
        loaded = config.load_conf_file(file_path)
    except ValueError as e:
        print(f"❌ 配置文件 {file_path} 有误: {e}")
        return False
    if loaded:
        print(f"✅ 已读取配置文件: {file_path}")
    elif not quiet:
        print(f"⚠️ 未找到配置文件 {file_path}，使用缺省配置")
    return loaded


def show_current_config(config: Config):
    """按配置段打印"""
    print("\n" + "=" * 60)
    print(f"📋 工作台配置（缺省类型 {config.default_cartan}）")
    print("=" * 60)
    for title, section in (("缺省参数", config.defaults), ("计算参数", config.compute), ("缓存", config.cache)):
        print(f"\n[{title}]")
        for key, value in section.items():
            print(f"  {key:22}= {value}")
    print("=" * 60)


def set_value(config: Config, key: str, value: str) -> bool:
    try:
        config.update_setting(key, value)
    except ValueError as e:
        print(f"❌ {e}")
        return False
    print(f"✅ {key} = {value}")
    return True


def describe_cartan(text: str) -> bool:
    """打印类型的秩、正根数、w0 约化词与对合 σ"""
    try:
        cd = CartanData.from_string(text)
    except ValueError as e:
        print(f"❌ {e}")
        return False
    print(f"{cd.name}: 秩 {cd.rank}，正根 {len(positive_roots(cd))} 个，单边型: {'是' if cd.is_simply_laced else '否'}")
    print(f"  w0 = {longest_element_word(cd)}")
    print(f"  σ  = {opposition(cd)}")
    return True


def cache_summary(config: Config) -> Dict[str, int]:
    """缓存目录下各计算种类的条目数"""
    root = config.cache_path
    if not root.is_dir():
        return {}
    return {kind.name: len(list(kind.glob("*.json"))) for kind in sorted(root.iterdir()) if kind.is_dir()}


def test_config(config: Config) -> bool:
    """缓存目录可写且缺省类型可解析时返回 True"""
    print("\n🧪 检查工作台配置")
    cache_path = config.cache_path
    try:
        cache_path.mkdir(parents=True, exist_ok=True)
        writable = os.access(cache_path, os.W_OK)
    except OSError:
        writable = False
    print(f"  缓存目录 {cache_path}: {'✅ 可写' if writable else '❌ 不可写'}")

    try:
        cd = CartanData.from_string(config.default_cartan)
        print(f"  缺省类型 {cd.name}: ✅")
        parsed = True
    except ValueError as e:
        print(f"  缺省类型: ❌ {e}")
        parsed = False
    return writable and parsed


class ConfigShell:
    """交互式编辑器，一行一条命令，如 `set max_workers 8`"""

    def __init__(self, config: Config):
        self.config = config
        self.commands: Dict[str, Callable[[List[str]], None]] = {
            "show": lambda args: show_current_config(self.config),
            "set": self._set,
            "keys": lambda args: print("  " + "\n  ".join(SETTING_KEYS)),
            "save": lambda args: save_config_to_file(self.config, args[0] if args else DEFAULT_CONFIG_FILE),
            "load": self._load,
            "test": lambda args: test_config(self.config),
            "cartan": self._cartan,
            "cache": self._cache,
            "help": lambda args: self.print_help(),
        }

    def print_help(self):
        print("\n📖 可用命令:")
        print("  show               显示当前配置")
        print("  keys               列出可设置的键")
        print("  set KEY VALUE      修改配置项")
        print("  save [FILE]        保存配置")
        print("  load FILE          读取配置")
        print("  test               检查配置")
        print("  cartan [TYPE]      查看类型信息（缺省为当前类型）")
        print("  cache              各计算种类的缓存条目数")
        print("  quit               退出")

    def _set(self, args: List[str]):
        if len(args) != 2:
            print("❌ 用法: set KEY VALUE")
            return
        set_value(self.config, *args)

    def _load(self, args: List[str]):
        if not args:
            print("❌ 用法: load FILE")
            return
        load_config_from_file(self.config, args[0])

    def _cartan(self, args: List[str]):
        describe_cartan(args[0] if args else self.config.default_cartan)

    def _cache(self, args: List[str]):
        summary = cache_summary(self.config)
        if not summary:
            print(f"  缓存为空: {self.config.cache_path}")
        for kind, count in summary.items():
            print(f"  {kind:10} {count}")

    def execute(self, line: str) -> bool:
        """执行一行命令；返回 False 表示退出"""
        try:
            words = shlex.split(line)
        except ValueError as e:
            print(f"❌ {e}")
            return True
        if not words:
            return True
        name, args = words[0].lower(), words[1:]
        if name in ("quit", "exit"):
            return False
        handler = self.commands.get(name)
        if handler is None:
            print(f"❌ 未知命令 {name}，输入 help 查看")
        else:
            handler(args)
        return True

    def run(self):
        print("\n🔧 交互式配置编辑器（help 查看命令）")
        while True:
            try:
                if not self.execute(input("\nbiperfect> ")):
                    break
            except (KeyboardInterrupt, EOFError):
                print()
                break
        print("👋 已退出")


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    parser = argparse.ArgumentParser(description="双完美基工作台配置管理工具")
    parser.add_argument("--show", action="store_true", help="显示当前配置")
    parser.add_argument("--save", metavar="FILE", help="保存配置到指定文件")
    parser.add_argument("--load", metavar="FILE", help="从指定文件加载配置")
    parser.add_argument("--set", nargs=2, metavar=("KEY", "VALUE"), help="设置配置项 (键 值)")
    parser.add_argument("--test", action="store_true", help="测试配置")
    parser.add_argument("--interactive", "-i", action="store_true", help="启动交互式配置编辑器")
    args = parser.parse_args(argv)

    config = get_config()
    if args.load:
        if not load_config_from_file(config, args.load):
            return 2
    else:
        load_config_from_file(config, quiet=True)

    if args.set and not set_value(config, *args.set):
        return 2

    code = 0
    if args.test:
        code = 0 if test_config(config) else 1
    elif args.interactive:
        ConfigShell(config).run()
    elif args.show or not (args.save or args.set):
        show_current_config(config)

    if args.save and not save_config_to_file(config, args.save):
        code = 1
    return code


if __name__ == "__main__":
    raise SystemExit(main())
