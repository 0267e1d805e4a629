"""
CSV／JSON 輸出入工具
"""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, TextIO, Union
from pydantic import BaseModel
from ..exceptions import ScheduleParseError
from ..models.result_models import TRAJECTORY_COLUMNS, Trajectory

SCHEDULE_COLUMNS = ["t_us", "f_GHz"]


def format_cell(value: Any) -> str:
    """浮點數以最短可還原表示輸出，None 輸出為空字串"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(sink: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """寫出含標頭列的 CSV"""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_rows(f, header, rows)
    return path


def write_trajectory(trajectory: Trajectory, sink: TextIO) -> None:
    write_rows(sink, TRAJECTORY_COLUMNS, trajectory.rows())


def write_schedule(trajectory: Trajectory, sink: TextIO) -> None:
    """控制排程 (t_us, f_GHz)"""
    write_rows(sink, SCHEDULE_COLUMNS, zip(trajectory.t, trajectory.f))


def load_schedule(source: Union[TextIO, Iterable[str], str]) -> List[tuple]:
    """讀取 "t_us,f_GHz" 排程（標頭列可省略），回傳 (t, f) 列表"""
    if isinstance(source, str):
        source = io.StringIO(source)

    points = []
    for line_no, row in enumerate(csv.reader(source), start=1):
        cells = [cell.strip() for cell in row]
        if not cells or all(not c for c in cells):
            continue
        if line_no == 1 and cells == SCHEDULE_COLUMNS:
            continue
        if len(cells) != 2:
            raise ScheduleParseError(f"需要 2 個欄位，實際為 {len(cells)}", line_no)
        try:
            t, f = float(cells[0]), float(cells[1])
        except ValueError:
            raise ScheduleParseError(f"無法解析數值 {cells!r}", line_no)
        if not (math.isfinite(t) and math.isfinite(f)):
            raise ScheduleParseError("數值必須為有限值", line_no)
        if t < 0:
            raise ScheduleParseError(f"時間不可為負：{t}", line_no)
        if points and t <= points[-1][0]:
            raise ScheduleParseError(f"時間必須嚴格遞增：{t} <= {points[-1][0]}", line_no)
        points.append((t, f))

    if not points:
        raise ScheduleParseError("排程沒有任何資料列")
    return points


def dump_json(model: BaseModel) -> str:
    """以宣告欄位順序輸出 JSON（結尾換行）"""
    return json.dumps(model.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], model: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_json(model))
    return path
