"""
命令列介面

子命令：
  run                    執行單一情境，寫出 report.json、trajectory.csv、control.csv
  figure                 產生 fig2 / fig3a / fig3b / fig4 的 CSV 資料
  sweep                  沿單一欄位掃描情境
  calibrate-temperature  以 W_ex/ln2 目標值校準溫度
  spectra                列出 Γ(f) 表格或設計準則

結束碼：0 成功，1 設定錯誤，2 數值失敗。

範例：
  python -m app.cli run --config lz-default
  python -m app.cli sweep --config lz-default --axis epsilon=1e-6:1e-4:9
  python -m app.cli figure fig3b --out output
  python -m app.cli spectra jqf --points 61 --format json
"""
import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import List, Optional
import numpy as np
from .config import get_settings
from .exceptions import ConfigurationError, ResetError
from .models.result_models import ErrorResponse
from .models.scenario_models import Scenario
from .models.spectrum_models import SPECTRUM_NAMES
from .physics.spectra import eval_rate, guideline_report
from .services.figure_service import FIGURES, FigureService
from .services.reset_service import ResetService
from .services.scenario_service import ScenarioService
from .services.sweep_service import REFERENCE_W_EX_NORM, SweepService
from .utils.csv_io import dump_json, write_csv, write_rows
from .utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class ArgumentParser(argparse.ArgumentParser):
    """用法錯誤以結束碼 1 結束（2 保留給數值失敗）"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: 錯誤：{message}\n")


def create_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = ArgumentParser(
        prog="qubit-reset",
        description="頻率可調量子位元的時間最佳重置工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("--out", default=settings.output_dir, help=f"輸出目錄（預設：{settings.output_dir}）")
    parser.add_argument("--grid", type=int, help="網格點數（覆寫 numerics.grid_points）")
    parser.add_argument("--cap", type=float, help="速率截斷值 µs⁻¹（覆寫 numerics.rate_cap）")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="標準輸出格式")

    sub = parser.add_subparsers(dest="command", required=True)

    cmd_run = sub.add_parser("run", help="執行單一情境")
    cmd_run.add_argument("--config", required=True, help="情境設定 JSON 路徑或內建名稱（如 lz-default）")

    cmd_figure = sub.add_parser("figure", help="產生圖表資料")
    cmd_figure.add_argument("which", choices=list(FIGURES) + ["all"])
    cmd_figure.add_argument("--config-dir", help="含 <內建名稱>.json 覆寫設定的目錄")

    cmd_sweep = sub.add_parser("sweep", help="參數掃描")
    cmd_sweep.add_argument("--config", required=True, help="情境設定 JSON 路徑或內建名稱")
    cmd_sweep.add_argument("--axis", required=True, help='掃描軸 "field=start:stop:n"')

    cmd_cal = sub.add_parser("calibrate-temperature", help="溫度校準")
    cmd_cal.add_argument(
        "--targets",
        default=",".join(f"{k}={v}" for k, v in REFERENCE_W_EX_NORM.items()),
        help="目標 W_ex/ln2，如 lz=18.53,prot=22.51",
    )
    cmd_cal.add_argument("--fit", help="參與擬合的頻譜，如 lz,prot（預設：目標中的 lz 與 prot）")
    cmd_cal.add_argument("--points", type=int, default=64, help="溫度掃描點數")
    cmd_cal.add_argument("--t-min", type=float, default=0.005, help="溫度下限 K")
    cmd_cal.add_argument("--t-max", type=float, default=0.020, help="溫度上限 K")

    cmd_spectra = sub.add_parser("spectra", help="列出 Γ(f) 表格")
    cmd_spectra.add_argument("name", nargs="?", choices=SPECTRUM_NAMES, help="頻譜名稱（省略時列出全部）")
    cmd_spectra.add_argument("--points", type=int, default=61, help="取樣點數")
    cmd_spectra.add_argument("--guidelines", action="store_true", help="輸出設計準則報告")
    return parser


def apply_numerics_flags(scenario: Scenario, args: argparse.Namespace) -> Scenario:
    """--grid / --cap 覆寫數值參數"""
    updates = {}
    if args.grid is not None:
        updates["grid_points"] = args.grid
    if args.cap is not None:
        updates["rate_cap"] = args.cap
    if not updates:
        return scenario
    data = scenario.model_dump()
    data["numerics"].update(updates)
    return ScenarioService().parse(data)


def parse_targets(text: str) -> dict:
    targets = {}
    for item in text.split(","):
        try:
            key, value = item.split("=")
            targets[key.strip()] = float(value)
        except ValueError:
            raise ConfigurationError(f"無效的校準目標：{item!r}")
    return targets


def cmd_run(args: argparse.Namespace) -> int:
    service = ResetService()
    scenario, base_dir = service.scenarios.load(args.config)
    scenario = apply_numerics_flags(scenario, args)
    report, trajectory, _ = service.run_scenario(scenario, base_dir)
    run_dir = service.write_outputs(scenario, report, trajectory, args.out)
    if args.format == "json":
        sys.stdout.write(dump_json(report))
    else:
        print(report.summary_line())
    logger.info(f"結果目錄：{run_dir}")
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    paths = FigureService().generate(args.which, args.out, args.config_dir)
    for path in paths:
        print(path)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario_service = ScenarioService()
    scenario, base_dir = scenario_service.load(args.config)
    scenario = apply_numerics_flags(scenario, args)
    rows = asyncio.run(SweepService().sweep(scenario, args.axis, base_dir))

    out_dir = Path(args.out) / f"{scenario.name}-{scenario.content_hash()}"
    header = list(rows[0].keys())
    path = write_csv(out_dir / "sweep.csv", header, ([row[k] for k in header] for row in rows))
    if args.format == "json":
        print(json.dumps(rows, indent=2, ensure_ascii=False))
    else:
        print(path)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    targets = parse_targets(args.targets)
    fit = [name.strip() for name in args.fit.split(",")] if args.fit else None
    result = asyncio.run(
        SweepService().calibrate_temperature(targets, (args.t_min, args.t_max), args.points, fit=fit)
    )
    if args.format == "json":
        sys.stdout.write(dump_json(result))
    else:
        write_rows(
            sys.stdout,
            ["spectrum", "target", "computed", "residual", "fitted", "joint_residual"],
            (
                [
                    k,
                    result.targets[k],
                    result.computed[k],
                    result.residuals[k],
                    k in result.fit_spectra,
                    result.joint_residuals[k],
                ]
                for k in result.targets
            ),
        )
        print(f"best_temperature_K={result.best_temperature_K!r}")
        print(f"joint_temperature_K={result.joint_temperature_K!r}")
    return EXIT_OK


def cmd_spectra(args: argparse.Namespace) -> int:
    scenario_service = ScenarioService()
    names = [args.name] if args.name else SPECTRUM_NAMES
    base = scenario_service.builtin("lz-default")
    if args.cap is not None:
        base = apply_numerics_flags(base, args)
    numerics = base.numerics
    bounds = base.bounds()

    if args.guidelines:
        reports = []
        for name in names:
            model = scenario_service.build_model(base.model_copy(update={"spectrum": name}))
            reports.append(guideline_report(model, bounds, args.grid or numerics.grid_points, numerics.rate_cap))
        if args.format == "json":
            print(json.dumps([r.model_dump(mode="json") for r in reports], indent=2, ensure_ascii=False))
        else:
            header = list(reports[0].model_dump().keys())
            write_rows(sys.stdout, header, ([r.model_dump()[k] for k in header] for r in reports))
        return EXIT_OK

    if args.points < 2:
        raise ConfigurationError("--points 至少為 2")
    freqs = np.linspace(bounds.f_min, bounds.f_max, args.points)
    table = {"f_GHz": freqs.tolist()}
    for name in names:
        model = scenario_service.build_model(base.model_copy(update={"spectrum": name}))
        table[name] = eval_rate(model, freqs, numerics.rate_cap).tolist()

    if args.format == "json":
        print(json.dumps(table, indent=2))
    else:
        header = list(table.keys())
        write_rows(sys.stdout, header, zip(*(table[k] for k in header)))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "figure": cmd_figure,
    "sweep": cmd_sweep,
    "calibrate-temperature": cmd_calibrate,
    "spectra": cmd_spectra,
}


def main(argv: Optional[List[str]] = None) -> int:
    """命令列進入點，回傳結束碼"""
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResetError as e:
        error = ErrorResponse(error_code=e.error_code, message=e.message, user_message=e.user_message)
        print(f"錯誤 [{error.error_code}]：{error.message}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error("輸入無效", error=e)
        print(f"錯誤 [INVALID_INPUT]：{e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
