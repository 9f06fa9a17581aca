"""Trace and anchor file formats.

A trace file is JSON Lines, one record per iteration::

    {"t": 0, "K": 8, "B": 512, "worker_sqnorms": [...], "agg_sqnorm": 1.0,
     "compute_s": 0.33, "sync_s": 0.33}

All records in one file must share the same (K, B).  The anchors side file
is a single JSON object: ``{"anchors": [{"K": 8, "B": 384, "epochs": 35.2},
...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .config import JobConfig
from .errors import ConfigurationError, TraceParseError
from .noise import IterationSample


def write_trace(
    path: str | Path, config: JobConfig, samples: Iterable[IterationSample]
) -> None:
    path = Path(path)
    with path.open("w") as fh:
        for s in samples:
            record = {
                "t": s.iteration,
                "K": config.workers,
                "B": config.global_batch,
                "worker_sqnorms": list(s.per_worker_grad_sqnorms),
                "agg_sqnorm": s.aggregated_grad_sqnorm,
                "compute_s": s.compute_time_s,
                "sync_s": s.sync_time_s,
            }
            fh.write(json.dumps(record) + "\n")


def read_trace(path: str | Path) -> tuple[JobConfig, list[IterationSample]]:
    """Parse one trace file, validating record shape and (K, B) consistency."""
    path = Path(path)
    config: JobConfig | None = None
    samples: list[IterationSample] = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceParseError(str(path), lineno, f"invalid JSON: {exc}") from None
            if not isinstance(record, dict):
                raise TraceParseError(str(path), lineno, "record must be an object")
            for key in ("t", "K", "B", "worker_sqnorms", "agg_sqnorm", "compute_s", "sync_s"):
                if key not in record:
                    raise TraceParseError(str(path), lineno, f"missing field {key!r}")
            try:
                line_config = JobConfig(int(record["K"]), int(record["B"]))
            except (ConfigurationError, TypeError, ValueError) as exc:
                raise TraceParseError(str(path), lineno, str(exc)) from None
            if config is None:
                config = line_config
            elif line_config != config:
                raise TraceParseError(
                    str(path),
                    lineno,
                    f"configuration changed mid-file: expected "
                    f"K={config.workers}, B={config.global_batch}",
                )
            norms = record["worker_sqnorms"]
            if not isinstance(norms, list) or len(norms) != config.workers:
                raise TraceParseError(
                    str(path),
                    lineno,
                    f"worker_sqnorms must list exactly {config.workers} values",
                )
            try:
                sample = IterationSample(
                    iteration=int(record["t"]),
                    per_worker_grad_sqnorms=tuple(float(v) for v in norms),
                    aggregated_grad_sqnorm=float(record["agg_sqnorm"]),
                    compute_time_s=float(record["compute_s"]),
                    sync_time_s=float(record["sync_s"]),
                )
            except (ConfigurationError, TypeError, ValueError) as exc:
                raise TraceParseError(str(path), lineno, str(exc)) from None
            samples.append(sample)
    if config is None:
        raise TraceParseError(str(path), 0, "trace file has no records")
    return config, samples


def write_anchors(path: str | Path, anchors: list[tuple[JobConfig, float]]) -> None:
    doc = {
        "anchors": [
            {"K": cfg.workers, "B": cfg.global_batch, "epochs": epochs}
            for cfg, epochs in anchors
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_anchors(path: str | Path) -> list[tuple[JobConfig, float]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TraceParseError(str(path), 0, f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "anchors" not in doc or not isinstance(
        doc["anchors"], list
    ):
        raise TraceParseError(str(path), 0, 'expected an object with an "anchors" list')
    out = []
    for i, entry in enumerate(doc["anchors"]):
        where = f"anchors[{i}]"
        if not isinstance(entry, dict) or not {"K", "B", "epochs"} <= set(entry):
            raise TraceParseError(str(path), 0, f"{where} needs K, B, and epochs")
        try:
            cfg = JobConfig(int(entry["K"]), int(entry["B"]))
            epochs = float(entry["epochs"])
        except (ConfigurationError, TypeError, ValueError) as exc:
            raise TraceParseError(str(path), 0, f"{where}: {exc}") from None
        if epochs <= 0:
            raise TraceParseError(str(path), 0, f"{where}: epochs must be > 0")
        out.append((cfg, epochs))
    return out
