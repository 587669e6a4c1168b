"""
命令行入口

用法:
    python -m app.cli <command> [options]
"""

import sys

from app.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
