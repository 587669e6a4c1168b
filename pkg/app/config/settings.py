"""
统一配置管理

基于环境变量的配置系统，支持不同环境(dev/test/prod)的配置。
包含日志、并行度、Oracle 规模上限、BalancedPools 切分网格、甘特图输出精度等配置项。
"""

from typing import Optional
from pydantic import Field, validator
from pydantic_settings import BaseSettings

# 暴力搜索的绝对上限：10! 次评估
ORACLE_HARD_LIMIT = 10

_ENVIRONMENT_ALIASES = {'production': 'prod', 'development': 'dev', 'testing': 'test'}


def _one_of(name: str, value, choices):
    if value not in choices:
        raise ValueError(f"{name} must be one of: {', '.join(choices)}")
    return value


class Settings(BaseSettings):
    """系统配置类"""

    # ============= 基础配置 =============
    APP_NAME: str = "makespan-lab"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = Field(default="dev", description="运行环境: dev/test/prod")
    DEBUG: bool = Field(default=True, validate_default=True, description="调试模式")

    # ============= 日志配置 =============
    LOG_LEVEL: str = Field(default="WARNING", description="日志级别")
    LOG_FORMAT: str = Field(
        default="text",
        description="标准输出日志格式: json/text；本地日志文件固定为 text",
    )
    LOG_CONSOLE_ENABLED: bool = Field(default=True, description="是否输出日志到标准错误")
    LOG_FILE_PATH: Optional[str] = Field(default=None, description="日志文件路径")

    # ============= 并行配置 =============
    MAKESPAN_LAB_THREADS: int = Field(
        default=1,
        description="排列搜索 / 切分搜索 / ρ 扫描的最大并行进程数；1 表示串行",
    )

    # ============= 算法配置 =============
    ORACLE_MAX_JOBS: int = Field(
        default=ORACLE_HARD_LIMIT,
        description="暴力搜索允许的最大作业数（不超过 10）",
    )
    BALANCED_POOLS_SPLIT_MODE: str = Field(
        default="proportional",
        description="BalancedPools 切分网格: proportional / full_grid",
    )

    # ============= 输出配置 =============
    GANTT_SIGNIFICANT_DIGITS: int = Field(default=15, description="十进制渲染的有效数字位数")
    GENERATOR_MAX_DENOMINATOR: int = Field(default=100, description="随机工作负载时长的最大分母")

    @validator('ENVIRONMENT', pre=True)
    def normalize_environment(cls, v):
        """兼容 production / development / testing 写法"""
        if isinstance(v, str):
            v = _ENVIRONMENT_ALIASES.get(v.lower(), v)
        return _one_of('ENVIRONMENT', v, ('dev', 'test', 'prod'))

    @validator('DEBUG', pre=True)
    def disable_debug_in_prod(cls, v, values):
        return False if values.get('ENVIRONMENT') == 'prod' else v

    @validator('LOG_LEVEL')
    def normalize_log_level(cls, v):
        return _one_of('LOG_LEVEL', v.upper(), ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'))

    @validator('LOG_FORMAT')
    def check_log_format(cls, v):
        return _one_of('LOG_FORMAT', v, ('json', 'text'))

    @validator('BALANCED_POOLS_SPLIT_MODE')
    def check_split_mode(cls, v):
        return _one_of('BALANCED_POOLS_SPLIT_MODE', v, ('proportional', 'full_grid'))

    @validator('MAKESPAN_LAB_THREADS')
    def check_threads(cls, v):
        if v < 1:
            raise ValueError(f'MAKESPAN_LAB_THREADS must be >= 1 (got {v})')
        return v

    @validator('GANTT_SIGNIFICANT_DIGITS', 'GENERATOR_MAX_DENOMINATOR')
    def check_output_settings(cls, v):
        """十进制位数与分母上限"""
        if v < 1:
            raise ValueError(f'GANTT_SIGNIFICANT_DIGITS/GENERATOR_MAX_DENOMINATOR must be >= 1 (got {v})')
        return v

    @validator('ORACLE_MAX_JOBS')
    def check_oracle_limit(cls, v):
        """只能调小，不能突破 10!"""
        if not 1 <= v <= ORACLE_HARD_LIMIT:
            raise ValueError(f'ORACLE_MAX_JOBS must be between 1 and {ORACLE_HARD_LIMIT}')
        return v

    def is_production(self) -> bool:
        return self.ENVIRONMENT == 'prod'

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True
        extra = "ignore"


# 全局配置实例
settings = Settings()


def get_settings() -> Settings:
    """获取配置实例"""
    return settings


def load_settings_from_env() -> Settings:
    """从环境变量重新加载配置"""
    return Settings()
