"""JSON and CSV serialization of reports."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources


NONFINITE = {math.inf: "Infinity", -math.inf: "-Infinity"}


def _strict(obj):
    """Replace non-finite floats by strings that ``float()`` parses back."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "NaN" if math.isnan(obj) else NONFINITE[obj]
    if isinstance(obj, dict):
        return {k: _strict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_strict(v) for v in obj]
    return obj


def dumps(payload):
    """Canonical strict JSON: sorted keys, two-space indent, shortest round-trip floats."""
    return json.dumps(_strict(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema():
    with resources.files("nbar_inclusion").joinpath("schema/report.schema.json").open() as fh:
        return json.load(fh)


def to_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def verdict_rows(verdict):
    for report in (verdict.condition_i, verdict.condition_ii):
        for m, v in report.samples:
            yield report.condition_id, m, v


def profile_rows(profile):
    for entry in profile:
        yield entry.N, entry.estimate.value


def transform_rows(result):
    for n, t in enumerate(result.T.tolist()):
        x = "" if n == 0 or result.X is None else float(result.X[n])
        yield n, t, x


def example_rows(report):
    for b in report.bounds:
        for m, v in b.samples:
            yield b.name, m, v


def write_witness_csv(path, witness):
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(["v", "x"], ((i + 1, float(x)) for i, x in enumerate(witness))))
