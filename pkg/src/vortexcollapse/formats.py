"""JSON and CSV readers and writers used by the command line."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable
from pathlib import Path
from typing import IO, Any

import numpy as np

from .bounds import CountAudit
from .core import Configuration, VortexSystem


class FormatError(ValueError):
    """An input file parses but does not have the expected structure."""


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


# -- configurations


def configuration_to_dict(config: Configuration, system: VortexSystem) -> dict:
    return {
        "gammas": [float(g) for g in system.gammas],
        "positions": [[float(z.real), float(z.imag)] for z in config.positions],
    }


def configuration_from_dict(data: dict) -> tuple[Configuration, VortexSystem]:
    try:
        system = VortexSystem(np.array(data["gammas"], dtype=float))
        config = Configuration.from_pairs(data["positions"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"configuration JSON lacks or garbles {exc.args[0]!r}") from exc
    return config, system


def read_configuration(path: str | Path) -> tuple[Configuration, VortexSystem]:
    return configuration_from_dict(read_json(path))


# -- counts


def counts_to_dict(counts: CountAudit) -> dict:
    return {
        "per_lambda": [
            {"re": lam.real, "im": lam.imag, "count": int(c)}
            for lam, c in sorted(counts.per_lambda.items(), key=lambda kv: (kv[0].real, kv[0].imag))
        ],
        "n_i": counts.n_i,
        "n_minus_i": counts.minus_i,
        "n_1": counts.n_1,
        "n_minus_1": counts.minus_1,
    }


def counts_from_dict(data: dict) -> CountAudit:
    if not isinstance(data, dict):
        raise FormatError("count JSON must be an object")
    per = {complex(e["re"], e["im"]): int(e["count"]) for e in data.get("per_lambda", [])}
    return CountAudit(
        per,
        n_i=int(data.get("n_i", 0)),
        n_minus_i=data.get("n_minus_i"),
        n_1=int(data.get("n_1", 20)),
        n_minus_1=data.get("n_minus_1"),
    )


# -- CSV


def write_csv(rows: Iterable[Iterable[Any]], header: list[str], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])


def solutions_rows(candidates, system) -> tuple[list[str], list[list]]:
    n = system.n
    header = ["lambda_re", "lambda_im"]
    header += [f"{c}{k}_{part}" for c in "zw" for k in range(1, n + 1) for part in ("re", "im")]
    header += ["residual", "is_real"]
    rows = []
    for cand in candidates:
        row: list = [cand.lam.real, cand.lam.imag]
        for vec in (cand.z, cand.w):
            for v in vec:
                row += [float(v.real), float(v.imag)]
        row += [float(cand.residual), int(cand.is_real())]
        rows.append(row)
    return header, rows


def sweep_rows(rows) -> tuple[list[str], list[list]]:
    header = ["a", "b", "c", "lambda_re", "lambda_im", "residual"]
    header += [f"z{k}_{part}" for k in range(1, 6) for part in ("re", "im")]
    out = []
    for r in rows:
        line = [r.a, r.b, r.c, r.lam.real, r.lam.imag, r.residual]
        for z in r.positions:
            line += [float(z.real), float(z.imag)]
        out.append(line)
    return header, out


def trajectory_rows(traj) -> tuple[list[str], list[list]]:
    n = traj.states.shape[1]
    header = ["t"] + [f"z{k}_{part}" for k in range(1, n + 1) for part in ("re", "im")]
    header += ["H", "abs_M", "I", "min_distance"]
    out = []
    for k, t in enumerate(traj.times):
        line = [float(t)]
        for z in traj.states[k]:
            line += [float(z.real), float(z.imag)]
        line += [float(traj.hamiltonian[k]), float(abs(traj.moment[k])),
                 float(traj.impulse[k]), float(traj.min_distance[k])]
        out.append(line)
    return header, out
