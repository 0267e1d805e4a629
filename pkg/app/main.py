"""
量子位元重置工具 HTTP 服務
"""
import asyncio
from contextlib import asynccontextmanager
from typing import Any, Dict, Optional
import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from .config import get_settings, is_production
from .exceptions import ConfigurationError, NumericalError, ResetError
from .models.result_models import ErrorResponse, GuidelineReport, ResetReport
from .models.scenario_models import Scenario
from .models.spectrum_models import SPECTRUM_NAMES
from .physics.constants import ANGULAR_PER_GHZ
from .physics.spectra import eval_rate, guideline_report
from .services.reset_service import ResetService
from .services.scenario_service import ScenarioService
from .utils.logger import get_logger

logger = get_logger(__name__)

VERSION = "1.0.0"

# 全域服務實例
reset_service: ResetService = None
scenario_service: ScenarioService = None


class ResetRequest(BaseModel):
    """POST /reset 請求：完整情境或內建情境名稱擇一"""

    scenario: Optional[Dict[str, Any]] = None
    builtin: Optional[str] = None


@asynccontextmanager
async def lifespan(app: FastAPI):
    """應用程式生命週期管理"""
    global reset_service, scenario_service

    logger.info("正在啟動量子位元重置服務...")
    try:
        reset_service = ResetService()
        scenario_service = ScenarioService()

        mismatches = scenario_service.verify_builtin_table()
        if mismatches:
            logger.warning(f"內建頻譜參數與參考表不一致：{mismatches}")

        logger.info("量子位元重置服務啟動完成")
        yield
    except Exception as e:
        logger.error("應用程式啟動時發生錯誤", error=e)
        raise
    finally:
        logger.info("正在關閉量子位元重置服務...")


app = FastAPI(
    title="Qubit Reset Optimizer",
    description="頻率可調量子位元的時間最佳重置計算服務",
    version=VERSION,
    lifespan=lifespan,
)


def _error_response(status_code: int, error: ResetError) -> JSONResponse:
    body = ErrorResponse(error_code=error.error_code, message=error.message, user_message=error.user_message)
    return JSONResponse(status_code=status_code, content=body.model_dump())


@app.exception_handler(ConfigurationError)
async def configuration_error_handler(request: Request, exc: ConfigurationError):
    logger.warning(f"設定錯誤：{exc.message}")
    return _error_response(422, exc)


@app.exception_handler(NumericalError)
async def numerical_error_handler(request: Request, exc: NumericalError):
    logger.error("數值計算失敗", error=exc)
    return _error_response(409, exc)


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """全域例外處理器"""
    logger.error("未處理的例外", error=exc)
    body = ErrorResponse(error_code="INTERNAL_ERROR", message=str(exc), user_message="系統發生錯誤，請稍後再試")
    return JSONResponse(status_code=500, content=body.model_dump())


@app.get("/")
async def root():
    """根路徑狀態"""
    settings = get_settings()
    return {
        "status": "ok",
        "message": "量子位元重置服務正在運行",
        "version": VERSION,
        "environment": settings.environment,
    }


@app.get("/health")
async def health_check():
    """健康檢查：Lorentzian 頻譜在共振頻率的峰值"""
    try:
        model = scenario_service.build_model(Scenario(spectrum="lz"))
        expected = ANGULAR_PER_GHZ * model.g**2 / model.kappa
        healthy = abs(eval_rate(model, model.f_r) - expected) <= 1e-9 * expected
        return {
            "status": "healthy" if healthy else "unhealthy",
            "services": {"physics": "ok" if healthy else "error"},
        }
    except Exception as e:
        logger.error("健康檢查時發生錯誤", error=e)
        return JSONResponse(status_code=503, content={"status": "unhealthy", "error": str(e)})


@app.get("/scenarios")
async def list_scenarios():
    """列出內建情境"""
    return {name: scenario_service.builtin(name).model_dump(mode="json") for name in scenario_service.builtin_names()}


@app.post("/reset", response_model=ResetReport)
async def run_reset(request: ResetRequest):
    """執行一次重置計算"""
    if (request.scenario is None) == (request.builtin is None):
        raise HTTPException(status_code=400, detail="scenario 與 builtin 必須擇一提供")
    if request.builtin is not None:
        scenario = scenario_service.builtin(request.builtin)
    else:
        scenario = scenario_service.parse(request.scenario)

    loop = asyncio.get_event_loop()
    report, _, _ = await loop.run_in_executor(None, lambda: reset_service.run_scenario(scenario))
    return report


def _spectrum_or_404(name: str):
    if name not in SPECTRUM_NAMES:
        raise HTTPException(status_code=404, detail=f"未知的頻譜：{name}")
    base = scenario_service.builtin("lz-default")
    return scenario_service.build_model(base.model_copy(update={"spectrum": name})), base


@app.get("/spectra/{name}")
async def spectrum_table(name: str, points: int = Query(61, ge=2, le=100_001)):
    """Γ(f) 表格"""
    model, base = _spectrum_or_404(name)
    bounds = base.bounds()
    freqs = np.linspace(bounds.f_min, bounds.f_max, points)
    rates = eval_rate(model, freqs, base.numerics.rate_cap)
    return {"spectrum": name, "f_GHz": freqs.tolist(), "rate_per_us": rates.tolist()}


@app.get("/spectra/{name}/guidelines", response_model=GuidelineReport)
async def spectrum_guidelines(name: str):
    """頻譜設計準則"""
    model, base = _spectrum_or_404(name)
    return guideline_report(model, base.bounds(), base.numerics.grid_points, base.numerics.rate_cap)


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=settings.port,
        reload=not is_production(),
        log_level="info" if is_production() else "debug",
    )
