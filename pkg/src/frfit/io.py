"""Model persistence (JSON) and sample CSV reading/writing.

Floats are serialized with round-trip-exact decimal formatting so that a
saved model predicts bit-identically after loading.  CSV columns follow the
fixed header ``omega,re,im``.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from typing import Optional

import numpy as np

from . import hybrid, interpolate
from .baselines import SeparateSEModel, _SEPart
from .errors import FrfitError
from .hybrid import HyperParams, PerKResult, SelectionReport
from .interpolate import FittedModel, TrainingSet
from .kernels import KernelParams, stable_spline_pair, szego_pair

SCHEMA_VERSION = "1"
CSV_HEADER = "omega,re,im"


class InputFormatError(FrfitError, ValueError):
    """Malformed CSV or model file."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_samples_csv(path) -> TrainingSet:
    """Parse a training CSV with header ``omega,re,im``."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise InputFormatError(
            f"{path}:1: expected header {CSV_HEADER!r}, got {lines[0]!r}"
            if lines
            else f"{path}: empty file"
        )
    omega, ys = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise InputFormatError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
        try:
            w, re_, im_ = (float(p) for p in parts)
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
        omega.append(w)
        ys.append(complex(re_, im_))
    if not omega:
        raise InputFormatError(f"{path}: no data rows")
    return TrainingSet(np.array(omega), np.array(ys))


def format_samples_csv(omega, y) -> str:
    rows = [CSV_HEADER]
    for w, v in zip(np.asarray(omega, dtype=float), np.asarray(y, dtype=complex)):
        rows.append(f"{_fmt(w)},{_fmt(v.real)},{_fmt(v.imag)}")
    return "\n".join(rows) + "\n"


def atomic_write_text(path, text: str):
    """Write via a temporary file and rename, so outputs appear whole."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".frfit-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_output(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def _complex_obj(z: complex):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _complex_from(obj) -> complex:
    return complex(obj["re"], obj["im"])


def _selection_to_dict(report: SelectionReport):
    return {
        "lambda": report.lambda_,
        "chosen_k": report.chosen_k,
        "elimination_trace": [_complex_obj(p) for p in report.elimination_trace],
        "notes": list(report.notes),
        "per_k": [
            {
                "K": e.K,
                "theta1": e.hyperparams.theta1,
                "alpha": e.hyperparams.alpha,
                "sigma2": e.hyperparams.sigma2,
                "poles": [_complex_obj(p) for p in e.hyperparams.poles],
                "eps_loo": e.eps_loo,
                "eps_loo_stab": e.eps_loo_stab,
                "instability": e.instability,
                "note": e.note,
            }
            for e in report.per_k
        ],
    }


def _selection_from_dict(obj) -> SelectionReport:
    per_k = [
        PerKResult(
            K=e["K"],
            hyperparams=HyperParams(
                theta1=e["theta1"],
                theta2=e["alpha"],
                poles=np.array([_complex_from(p) for p in e["poles"]], dtype=complex),
            ),
            eps_loo=e["eps_loo"],
            eps_loo_stab=e["eps_loo_stab"],
            instability=e["instability"],
            note=e.get("note"),
        )
        for e in obj["per_k"]
    ]
    return SelectionReport(
        per_k=per_k,
        lambda_=obj["lambda"],
        chosen_k=obj["chosen_k"],
        elimination_trace=[_complex_from(p) for p in obj["elimination_trace"]],
        notes=list(obj.get("notes", [])),
    )


def model_to_dict(
    model,
    kernel_name: str,
    symmetric: bool,
    seed: Optional[int] = None,
    selection: Optional[SelectionReport] = None,
):
    """Serializable description of a fitted model."""
    doc = {"schema_version": SCHEMA_VERSION}
    if isinstance(model, SeparateSEModel):
        ts = model.training
        doc["kernel"] = {
            "name": "se-separate",
            "alpha": None,
            "sigma2": None,
            "se": {
                "re": {"lengthscale": model.re.lengthscale, "sigma2": model.re.sigma2},
                "im": {"lengthscale": model.im.lengthscale, "sigma2": model.im.sigma2},
            },
        }
        doc["mean"] = None
        doc["coeffs"] = list(map(float, model.re.coeffs)) + list(map(float, model.im.coeffs))
        doc["dropped_rows"] = []
    elif isinstance(model, FittedModel):
        ts = model.training
        params = model.pair.params
        doc["kernel"] = {
            "name": kernel_name,
            "alpha": params.alpha,
            "sigma2": params.sigma2,
            "symmetric": symmetric,
        }
        if model.mean is not None and model.mean.poles is not None:
            doc["mean"] = {
                "poles": [_complex_obj(p) for p in model.mean.poles],
                "beta": list(map(float, model.mean.beta)),
            }
        else:
            doc["mean"] = None
        doc["coeffs"] = list(map(float, model.coeffs))
        doc["dropped_rows"] = list(map(int, model.degenerate_rows))
    else:
        raise TypeError(f"cannot serialize model of type {type(model)!r}")
    doc["training"] = [
        [float(w), float(v.real), float(v.imag)] for w, v in zip(ts.omega, ts.y)
    ]
    doc["symmetric"] = symmetric
    doc["seed"] = seed
    doc["selection"] = _selection_to_dict(selection) if selection is not None else None
    return doc


def model_from_dict(doc):
    """Rebuild a predictor from its serialized form.

    Returns ``(model, kernel_name, symmetric, seed, selection)``.  The kernel
    coefficients are restored verbatim, so predictions match the saved model
    bit for bit.
    """
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputFormatError(f"unsupported schema_version {doc.get('schema_version')!r}")
    rows = doc["training"]
    ts = TrainingSet(
        np.array([r[0] for r in rows]),
        np.array([complex(r[1], r[2]) for r in rows]),
        symmetric=bool(doc.get("symmetric", False)),
    )
    kernel = doc["kernel"]
    name = kernel["name"]
    seed = doc.get("seed")
    selection = _selection_from_dict(doc["selection"]) if doc.get("selection") else None
    if name == "se-separate":
        coeffs = np.asarray(doc["coeffs"], dtype=float)
        n = ts.n
        se = kernel["se"]
        model = SeparateSEModel(
            re=_SEPart(
                se["re"]["lengthscale"], se["re"]["sigma2"], coeffs[:n], ts.omega, np.nan
            ),
            im=_SEPart(
                se["im"]["lengthscale"], se["im"]["sigma2"], coeffs[n:], ts.omega, np.nan
            ),
            training=ts,
        )
        return model, name, False, seed, selection
    params = KernelParams(alpha=kernel["alpha"], sigma2=kernel["sigma2"])
    symmetric = bool(kernel.get("symmetric", True))
    if name == "szego":
        pair = szego_pair(params, symmetric=symmetric)
    elif name == "stable-spline":
        pair = stable_spline_pair(params, symmetric=symmetric)
    else:
        raise InputFormatError(f"unknown kernel name {name!r}")
    mean = None
    if doc.get("mean"):
        poles = np.array([_complex_from(p) for p in doc["mean"]["poles"]], dtype=complex)
        mean = hybrid.rational_basis(poles)
        mean.beta = np.asarray(doc["mean"]["beta"], dtype=float)
    su, pu, _, dropped = interpolate.augmented_observations(ts)
    model = FittedModel(
        pair=pair,
        mean=mean,
        training=ts,
        coeffs=np.asarray(doc["coeffs"], dtype=float),
        degenerate_rows=dropped,
        matrix=None,
        cond=np.nan,
        _aug_s=su,
        _aug_part=pu,
    )
    return model, name, symmetric, seed, selection


def save_model(path, doc):
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_model(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(doc)
