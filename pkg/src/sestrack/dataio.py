"""CSV, SVG and JSON-config input/output.

CSV files are UTF-8 with a header row, comma separators, ``\\n`` newlines
and floats printed at 17 significant digits, which round-trips IEEE
doubles exactly.  SVG output is a self-contained 800x500 document.  Config
documents are strict JSON (schema_version 1, unknown keys rejected).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .processes import (
    AR1,
    MA1,
    MAq,
    Constant,
    Linear,
    NoiseModel,
    Sinusoid,
    Table,
    TrendSpec,
    WhiteGaussian,
)

CONFIG_SCHEMA_VERSION = 1

_SVG_WIDTH = 800
_SVG_HEIGHT = 500
_MARGIN_LEFT, _MARGIN_RIGHT, _MARGIN_TOP, _MARGIN_BOTTOM = 62, 18, 18, 42


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def format_float(value: float) -> str:
    return f"{float(value):.17g}"


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def format_csv(header: list[str], columns: list[np.ndarray]) -> str:
    """Render equal-length columns as CSV text."""
    if len(header) != len(columns):
        raise ValueError("header and column counts differ")
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise ValueError("columns must have equal lengths")
    lines = [",".join(header)]
    for i in range(lengths.pop()):
        lines.append(",".join(_format_cell(col[i]) for col in columns))
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> Path:
    path = Path(path)
    path.write_text(format_csv(header, columns), encoding="utf-8", newline="")
    return path


def read_csv_column(path, column: str) -> np.ndarray:
    """Read one numeric column; any unparsable or non-finite entry is an
    error citing its data row (row 1 is the first row after the header)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: file is empty")
        if column not in header:
            raise ValueError(
                f"{path}: no column {column!r}; available columns: {', '.join(header)}"
            )
        index = header.index(column)
        values = []
        for row_number, row in enumerate(reader, start=1):
            if index >= len(row):
                raise ValueError(f"{path}: row {row_number}: missing field {column!r}")
            text = row[index]
            try:
                value = float(text)
            except ValueError:
                raise ValueError(
                    f"{path}: row {row_number}: cannot parse {text!r} in column {column!r}"
                ) from None
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}: row {row_number}: non-finite value {text!r} in column {column!r}"
                )
            values.append(value)
    return np.array(values)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def _scales(xs: np.ndarray, ys: np.ndarray):
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    pad = 0.05 * ((y1 - y0) or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    xspan = (x1 - x0) or 1.0
    plot_w = _SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + (x - x0) / xspan * plot_w

    def py(y: float) -> float:
        return _SVG_HEIGHT - _MARGIN_BOTTOM - (y - y0) / (y1 - y0) * plot_h

    return px, py, (x0, x1, y0, y1)


def _axes(px, py, limits) -> list[str]:
    x0, x1, y0, y1 = limits
    parts = [
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" '
        f'width="{_SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT}" '
        f'height="{_SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM}" '
        'fill="none" stroke="#555555" stroke-width="1"/>'
    ]
    for tick in np.linspace(x0, x1, 5):
        x = px(float(tick))
        parts.append(
            f'<line x1="{x:.2f}" y1="{_SVG_HEIGHT - _MARGIN_BOTTOM}" '
            f'x2="{x:.2f}" y2="{_SVG_HEIGHT - _MARGIN_BOTTOM + 5}" stroke="#555555"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_SVG_HEIGHT - _MARGIN_BOTTOM + 18}" '
            f'text-anchor="middle">{tick:.6g}</text>'
        )
    for tick in np.linspace(y0, y1, 5):
        y = py(float(tick))
        parts.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{y:.2f}" '
            f'x2="{_MARGIN_LEFT}" y2="{y:.2f}" stroke="#555555"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{y + 4:.2f}" '
            f'text-anchor="end">{tick:.6g}</text>'
        )
    return parts


def _polyline(px, py, xs, ys, color: str) -> str:
    points = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(xs, ys))
    return f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>'


def _legend(entries: list[tuple[str, str]]) -> list[str]:
    parts = []
    x = _MARGIN_LEFT + 12
    y = _MARGIN_TOP + 16
    for label, color in entries:
        parts.append(
            f'<line x1="{x}" y1="{y - 4}" x2="{x + 22}" y2="{y - 4}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        parts.append(f'<text x="{x + 28}" y="{y}">{label}</text>')
        y += 17
    return parts


def _svg_document(body: list[str]) -> str:
    head = (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}" '
        'font-family="sans-serif" font-size="12">'
    )
    background = f'<rect x="0" y="0" width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" fill="#ffffff"/>'
    return "\n".join([head, background, *body, "</svg>"]) + "\n"


def render_overlay_svg(
    steps: np.ndarray,
    observations: np.ndarray,
    trend: np.ndarray,
    estimates: np.ndarray,
) -> str:
    """Observations as light points, trend and estimate as polylines."""
    xs = np.asarray(steps, dtype=float)
    all_y = np.concatenate(
        [np.asarray(observations, float), np.asarray(trend, float), np.asarray(estimates, float)]
    )
    px, py, limits = _scales(xs, all_y)
    body = _axes(px, py, limits)
    dots = " ".join(
        f'<circle cx="{px(float(x)):.2f}" cy="{py(float(y)):.2f}" r="1.4"/>'
        for x, y in zip(xs, observations)
    )
    body.append(f'<g fill="#9db8d9" fill-opacity="0.55" stroke="none">{dots}</g>')
    body.append(_polyline(px, py, xs, trend, "#222222"))
    body.append(_polyline(px, py, xs, estimates, "#d0442c"))
    body.extend(
        _legend(
            [("observations", "#9db8d9"), ("trend", "#222222"), ("estimate", "#d0442c")]
        )
    )
    return _svg_document(body)


def render_curve_svg(steps: np.ndarray, values: np.ndarray, label: str) -> str:
    """Single polyline plot with a legend entry."""
    xs = np.asarray(steps, dtype=float)
    ys = np.asarray(values, dtype=float)
    px, py, limits = _scales(xs, ys)
    body = _axes(px, py, limits)
    body.append(_polyline(px, py, xs, ys, "#d0442c"))
    body.extend(_legend([(label, "#d0442c")]))
    return _svg_document(body)


def write_results(result, path, fmt: str = "csv") -> Path:
    """Persist a smoothed path, an MSE curve, or a bare trajectory array."""
    # imported here: experiments itself writes files through this function
    from .experiments import MseCurve, SmoothedPath

    if fmt not in ("csv", "svg"):
        raise ValueError(f'format must be "csv" or "svg", got {fmt!r}')
    path = Path(path)
    if isinstance(result, SmoothedPath):
        if fmt == "csv":
            return write_csv(
                path,
                ["t", "x", "m_star", "m_hat"],
                [result.steps, result.observations, result.trend, result.estimates],
            )
        text = render_overlay_svg(
            result.steps, result.observations, result.trend, result.estimates
        )
    elif isinstance(result, MseCurve):
        steps = np.arange(1, len(result.mean) + 1)
        if fmt == "csv":
            return write_csv(path, ["t", "mse", "stderr"], [steps, result.mean, result.stderr])
        text = render_curve_svg(steps, result.mean, "mean squared tracking error")
    elif isinstance(result, np.ndarray) and result.ndim == 1:
        steps = np.arange(1, len(result) + 1)
        if fmt == "csv":
            return write_csv(path, ["t", "value"], [steps, result])
        text = render_curve_svg(steps, result, "value")
    else:
        raise TypeError(f"cannot write results of type {type(result).__name__}")
    path.write_text(text, encoding="utf-8", newline="")
    return path


# ---------------------------------------------------------------------------
# JSON experiment configs
# ---------------------------------------------------------------------------

def _check_keys(mapping: dict, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(mapping, dict):
        raise ValueError(f"{where}: expected an object")
    keys = set(mapping)
    unknown = keys - required - optional
    if unknown:
        allowed = ", ".join(sorted(required | optional))
        raise ValueError(
            f"{where}: unknown key(s) {sorted(unknown)}; allowed keys: {allowed}"
        )
    missing = required - keys
    if missing:
        raise ValueError(f"{where}: missing required key(s) {sorted(missing)}")


def noise_to_dict(noise: NoiseModel) -> dict:
    if isinstance(noise, WhiteGaussian):
        return {"kind": "white", "var": noise.variance}
    if isinstance(noise, MA1):
        return {"kind": "ma1", "a": noise.coefficient, "var": noise.innovation_variance}
    if isinstance(noise, AR1):
        return {"kind": "ar1", "theta": noise.theta, "var": noise.innovation_variance}
    if isinstance(noise, MAq):
        return {"kind": "maq", "b": list(noise.coefficients), "var": noise.innovation_variance}
    raise TypeError(f"not a noise model: {type(noise).__name__}")


def noise_from_dict(data: dict) -> NoiseModel:
    kind = data.get("kind")
    if kind == "white":
        _check_keys(data, {"kind"}, {"var"}, "noise")
        return WhiteGaussian(float(data.get("var", 1.0)))
    if kind == "ma1":
        _check_keys(data, {"kind", "a"}, {"var"}, "noise")
        return MA1(float(data["a"]), float(data.get("var", 1.0)))
    if kind == "ar1":
        _check_keys(data, {"kind", "theta"}, {"var"}, "noise")
        return AR1(float(data["theta"]), float(data.get("var", 1.0)))
    if kind == "maq":
        _check_keys(data, {"kind", "b"}, {"var"}, "noise")
        return MAq(tuple(float(b) for b in data["b"]), float(data.get("var", 1.0)))
    raise ValueError(f"noise: unknown kind {kind!r}; expected white, ma1, ar1 or maq")


def trend_to_dict(trend: TrendSpec) -> dict:
    if isinstance(trend, Constant):
        return {"kind": "const", "level": trend.level}
    if isinstance(trend, Linear):
        return {"kind": "linear", "start": trend.start, "slope": trend.slope}
    if isinstance(trend, Sinusoid):
        return {"kind": "sin", "amp": trend.amplitude, "rate": trend.rate, "phase": trend.phase}
    if isinstance(trend, Table):
        return {"kind": "table", "values": list(trend.values)}
    raise TypeError(f"not a trend: {type(trend).__name__}")


def trend_from_dict(data: dict) -> TrendSpec:
    kind = data.get("kind")
    if kind == "const":
        _check_keys(data, {"kind", "level"}, set(), "trend")
        return Constant(float(data["level"]))
    if kind == "linear":
        _check_keys(data, {"kind", "start", "slope"}, set(), "trend")
        return Linear(float(data["start"]), float(data["slope"]))
    if kind == "sin":
        _check_keys(data, {"kind", "amp", "rate"}, {"phase"}, "trend")
        return Sinusoid(float(data["amp"]), float(data["rate"]), float(data.get("phase", 0.0)))
    if kind == "table":
        _check_keys(data, {"kind", "values"}, set(), "trend")
        return Table(tuple(float(v) for v in data["values"]))
    raise ValueError(f"trend: unknown kind {kind!r}; expected const, linear, sin or table")


def experiment_config_to_dict(config, output: dict | None = None) -> dict:
    document = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "noise": noise_to_dict(config.noise),
        "trend": trend_to_dict(config.trend),
        "alpha": config.alpha,
        "horizon": config.horizon,
        "replications": config.replications,
        "seed": config.seed,
        "init": config.init,
        "tail_fraction": config.tail_fraction,
    }
    if output:
        document["output"] = dict(output)
    return document


def experiment_config_from_dict(document: dict):
    from .experiments import ExperimentConfig

    _check_keys(
        document,
        {"schema_version", "noise", "trend", "alpha", "horizon", "replications", "seed"},
        {"init", "tail_fraction", "output"},
        "config",
    )
    version = document["schema_version"]
    if version != CONFIG_SCHEMA_VERSION:
        raise ValueError(
            f"config: schema_version {version!r} not supported; expected {CONFIG_SCHEMA_VERSION}"
        )
    init = document.get("init", "first")
    if not isinstance(init, str):
        init = float(init)
    output = document.get("output", {})
    if output:
        _check_keys(output, set(), {"csv", "svg"}, "config.output")
    config = ExperimentConfig(
        noise=noise_from_dict(document["noise"]),
        trend=trend_from_dict(document["trend"]),
        alpha=float(document["alpha"]),
        horizon=int(document["horizon"]),
        replications=int(document["replications"]),
        seed=int(document["seed"]),
        init=init,
        tail_fraction=float(document.get("tail_fraction", 0.1)),
    )
    return config, dict(output)


def load_experiment_config(path):
    """Read a strict JSON config; returns (ExperimentConfig, output options)."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from None
    return experiment_config_from_dict(document)


def save_experiment_config(config, path, output: dict | None = None) -> Path:
    path = Path(path)
    document = experiment_config_to_dict(config, output)
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    return path
