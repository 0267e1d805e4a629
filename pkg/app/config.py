"""
應用程式配置管理模組
"""
from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """應用程式設定"""

    # 應用程式設定
    environment: str = Field("development")
    debug: bool = Field(False)
    port: int = Field(8080)

    # GCP 設定（僅用於 Cloud Logging）
    gcp_project_id: Optional[str] = Field(None)

    # 輸出與執行設定
    output_dir: str = Field("output")
    max_workers: int = Field(4, ge=1)

    # 預設物理參數
    default_temperature_k: float = Field(0.010, gt=0)

    model_config = SettingsConfigDict(
        env_prefix="RESET_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# 全域設定實例
settings = Settings()


def get_settings() -> Settings:
    """取得應用程式設定"""
    return settings


def is_production() -> bool:
    """檢查是否為生產環境"""
    return settings.environment.lower() == "production"
