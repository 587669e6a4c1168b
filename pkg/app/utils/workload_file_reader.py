"""
工作负载文件读取工具

工作负载文件可能由不同环境的脚本生成，读取时先用 chardet 检测编码，
检测失败再依次尝试常用编码。
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import chardet

from app.core.exceptions import FileException
from app.core.logging import file_logger


class WorkloadFileReader:
    """文本文件读取器，支持多种编码"""

    # 支持的编码列表，按优先级排序
    ENCODINGS = ['utf-8', 'utf-8-sig', 'gbk', 'gb18030', 'latin1']

    @classmethod
    def read_text(cls, file_path: Union[str, Path]) -> Tuple[str, str]:
        """
        读取文本文件，自动识别编码

        Args:
            file_path: 文件路径

        Returns:
            Tuple[str, str]: (文件内容, 使用的编码)

        Raises:
            FileException: 文件不存在、不是普通文件或所有编码都无法解码
        """
        path = Path(file_path)
        if not path.exists():
            file_logger.warning(f"文件不存在: {path}")
            raise FileException("读取", str(path), f"文件不存在: {path}", not_found=True)
        if not path.is_file():
            raise FileException("读取", str(path), f"不是普通文件: {path}")

        detected = cls._detect_encoding(path)
        candidates = [detected] if detected else []
        candidates += [encoding for encoding in cls.ENCODINGS if encoding != detected]

        for encoding in candidates:
            content = cls._try_read_with_encoding(path, encoding)
            if content is not None:
                if content.startswith('﻿'):
                    content = content[1:]
                file_logger.debug(f"使用编码读取文件成功: {encoding}, {path}")
                return content, encoding

        file_logger.error(f"无法读取文件（所有编码尝试失败）: {path}")
        raise FileException("读取", str(path), f"无法识别文件编码: {path}")

    @classmethod
    def _detect_encoding(cls, file_path: Path) -> Optional[str]:
        try:
            with open(file_path, 'rb') as f:
                # 读取前10000字节用于检测
                raw_data = f.read(10000)
            result = chardet.detect(raw_data)
            if result and result['encoding'] and result['confidence'] > 0.7:
                return result['encoding'].lower()
        except OSError as e:
            file_logger.debug(f"编码检测失败: {file_path}, {e}")
        return None

    @classmethod
    def _try_read_with_encoding(cls, file_path: Path, encoding: str) -> Optional[str]:
        try:
            with open(file_path, 'r', encoding=encoding, errors='strict') as f:
                return f.read()
        except (UnicodeDecodeError, LookupError):
            return None
        except OSError as e:
            raise FileException("读取", str(file_path), f"文件读取失败: {e}") from e


def read_text_file(file_path: Union[str, Path]) -> str:
    """读取文本文件内容（便捷函数）"""
    content, _ = WorkloadFileReader.read_text(file_path)
    return content
