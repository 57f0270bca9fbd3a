"""
文件管理器
"""
import json
from pathlib import Path
from typing import Any, Dict

from .common import logger


def dump_json(data: Any) -> str:
    """确定性的JSON文本：键排序、两空格缩进、以换行结尾"""
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


class FileManager:
    """文件管理类"""

    @staticmethod
    def load_json_file(file_path: str) -> Dict[str, Any]:
        """
        加载JSON文件

        :param file_path: 文件路径
        :return: JSON数据
        """
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except FileNotFoundError:
            logger.error(f"错误：找不到文件 {file_path}")
            return {}
        except OSError as e:
            logger.error(f"错误：读取文件 {file_path} 失败: {e}")
            return {}
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            logger.error(f"错误：解析JSON文件 {file_path} 时出错: {e}")
            return {}

    @staticmethod
    def save_json_file(data: Dict[str, Any], file_path: str) -> bool:
        """
        保存数据到JSON文件

        :param data: 要保存的数据
        :param file_path: 文件路径
        :return: 是否成功保存
        """
        return FileManager.save_text_file(dump_json(data), file_path)

    @staticmethod
    def save_text_file(text: str, file_path: str) -> bool:
        """
        保存文本（DOT图、报告等）

        :param text: 文本内容
        :param file_path: 文件路径
        :return: 是否成功保存
        """
        try:
            output_file = Path(file_path)
            output_file.parent.mkdir(parents=True, exist_ok=True)

            with open(output_file, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)

            logger.info(f"数据已保存到: {file_path}")
            return True

        except OSError as e:
            logger.error(f"错误：保存文件时出错: {e}")
            return False

    @staticmethod
    def load_model_file(file_path: str) -> Dict[str, Any]:
        """
        加载用户提供的模型文件（模、基族），读不到或不是对象时报错

        :param file_path: 文件路径
        :return: JSON对象
        """
        data = FileManager.load_json_file(file_path)
        if not data:
            raise ValueError(f"无法读取模型文件: {file_path}")
        if not isinstance(data, dict):
            raise ValueError(f"模型文件顶层必须是JSON对象: {file_path}")
        return data
