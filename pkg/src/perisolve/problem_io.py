"""Reading and writing problem files and solution CSVs."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .char_symbol import ProblemSpec
from .exceptions import InputError
from .periodic_fourier import SampledFunction, TrigPolynomial, grid


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def problem_from_json(obj) -> tuple[ProblemSpec, TrigPolynomial | None]:
    """``{"n", "dim", "A", "delay", "forcing"}`` -> (problem, forcing or None)."""
    if not isinstance(obj, dict):
        raise InputError("problem file must hold a JSON object")
    problem = ProblemSpec.from_json(obj)
    forcing = None
    if obj.get("forcing") is not None:
        forcing = TrigPolynomial.from_json(obj["forcing"])
        if forcing.dim != problem.dim:
            raise InputError(f"forcing dim {forcing.dim} does not match problem dim {problem.dim}")
    return problem, forcing


def problem_to_json(problem: ProblemSpec, forcing: TrigPolynomial | None = None) -> dict:
    out = problem.to_json()
    if forcing is not None:
        out["forcing"] = forcing.to_json()
    return out


def load_problem(path) -> tuple[ProblemSpec, TrigPolynomial | None]:
    return problem_from_json(load_json(path))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def samples_to_csv(samples: np.ndarray) -> str:
    """Header ``t,re_u1,im_u1,...``; one row per uniform node, 17 significant digits."""
    samples = np.atleast_2d(np.asarray(samples, dtype=complex))
    M, d = samples.shape
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t"]
    for i in range(1, d + 1):
        header += [f"re_u{i}", f"im_u{i}"]
    writer.writerow(header)
    for t, row in zip(grid(M), samples):
        cells = [f"{t:.17g}"]
        for z in row:
            cells += [f"{z.real:.17g}", f"{z.imag:.17g}"]
        writer.writerow(cells)
    return buf.getvalue()


def samples_from_csv(text: str) -> SampledFunction:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "t" or (len(rows[0]) - 1) % 2:
        raise InputError("not a solution CSV (expected header t,re_u1,im_u1,...)")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    values = data[:, 1::2] + 1j * data[:, 2::2]
    return SampledFunction(values)


def write_text(path, text: str):
    Path(path).write_text(text)
