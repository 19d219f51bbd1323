"""On-disk formats: epoch bundles, model blobs, feature tables, manifests.

Binary payloads are little-endian 32-bit floats with exact declared sizes;
computation elsewhere stays 64-bit. Text formats are UTF-8 with LF line
endings and full-precision decimal floats, so identical inputs always
produce identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .eeg import Condition, EegEpochSet
from .errors import FormatError
from .surrogate import SurrogateConfig, SurrogateModel

EPB_MAGIC = b"EPB1"
EPB_VERSION = 1
_EPB_HEADER = struct.Struct("<4sHBIIIff")

SNM_MAGIC = b"SNM1"
SNM_VERSION = 1


def _json_bytes(doc: dict) -> bytes:
    return json.dumps(doc, separators=(",", ":"), sort_keys=True).encode("utf-8")


def write_epochs(path: str | Path, epochs: EegEpochSet) -> None:
    """Serialize an epoch set as an EPB1 bundle."""
    payload = np.ascontiguousarray(epochs.data, dtype="<f4").tobytes()
    trailer = _json_bytes(
        {
            "channel_labels": epochs.channel_labels,
            "category_labels": epochs.category_labels,
        }
    )
    header = _EPB_HEADER.pack(
        EPB_MAGIC,
        EPB_VERSION,
        int(epochs.condition),
        epochs.n_channels,
        epochs.n_timepoints,
        epochs.n_trials,
        np.float32(epochs.sample_rate),
        np.float32(epochs.t0),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(struct.pack("<I", len(trailer)))
        fh.write(trailer)


def read_epochs(path: str | Path) -> EegEpochSet:
    """Read an EPB1 bundle; sizes must match the header exactly."""
    blob = Path(path).read_bytes()
    if len(blob) < _EPB_HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, condition, channels, timepoints, trials, rate, t0 = (
        _EPB_HEADER.unpack_from(blob)
    )
    if magic != EPB_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != EPB_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    try:
        condition = Condition(condition)
    except ValueError:
        raise FormatError(f"{path}: unknown condition byte {condition}") from None

    n_values = trials * channels * timepoints
    offset = _EPB_HEADER.size
    end_payload = offset + 4 * n_values
    if len(blob) < end_payload + 4:
        raise FormatError(
            f"{path}: payload truncated (need {end_payload + 4} bytes, "
            f"have {len(blob)})"
        )
    data = np.frombuffer(blob, dtype="<f4", count=n_values, offset=offset)
    data = data.reshape(trials, channels, timepoints).astype(np.float64)

    (trailer_len,) = struct.unpack_from("<I", blob, end_payload)
    trailer_start = end_payload + 4
    if len(blob) != trailer_start + trailer_len:
        raise FormatError(
            f"{path}: size mismatch (declared {trailer_start + trailer_len} "
            f"bytes, file has {len(blob)})"
        )
    try:
        trailer = json.loads(blob[trailer_start:].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad JSON trailer: {exc}") from None
    return EegEpochSet(
        data=data,
        sample_rate=float(np.float32(rate)),
        t0=float(np.float32(t0)),
        channel_labels=trailer.get("channel_labels"),
        condition=condition,
        category_labels=trailer.get("category_labels"),
    )


def write_model(path: str | Path, model: SurrogateModel) -> None:
    """Serialize a surrogate model as an SNM1 blob."""
    header = _json_bytes(
        {
            "format_version": SNM_VERSION,
            "config": model.config.to_dict(),
            "init_seed": model.init_seed,
        }
    )
    with open(path, "wb") as fh:
        fh.write(SNM_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for group in (model.theta1, model.theta2):
            for p in group:
                fh.write(np.ascontiguousarray(p, dtype="<f4").tobytes())


def read_model(path: str | Path) -> SurrogateModel:
    """Read an SNM1 blob back into a surrogate model."""
    blob = Path(path).read_bytes()
    if len(blob) < 8 or blob[:4] != SNM_MAGIC:
        raise FormatError(f"{path}: not an SNM1 model blob")
    (header_len,) = struct.unpack_from("<I", blob, 4)
    header_end = 8 + header_len
    if len(blob) < header_end:
        raise FormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[8:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad JSON header: {exc}") from None
    if header.get("format_version") != SNM_VERSION:
        raise FormatError(
            f"{path}: unsupported format version {header.get('format_version')}"
        )
    config = SurrogateConfig.from_dict(header["config"])

    dims1 = [config.embed_dim, *config.theta1_layers]
    dims2 = [config.p300_dim, *config.theta2_layers]
    shapes: list[tuple[int, ...]] = []
    for dims in (dims1, dims2):
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            shapes.append((d_in, d_out))
            shapes.append((d_out,))
    n_values = sum(int(np.prod(s)) for s in shapes)
    if len(blob) != header_end + 4 * n_values:
        raise FormatError(
            f"{path}: parameter payload size mismatch "
            f"(need {4 * n_values} bytes, have {len(blob) - header_end})"
        )
    flat = np.frombuffer(blob, dtype="<f4", offset=header_end).astype(np.float64)
    params: list[np.ndarray] = []
    pos = 0
    for shape in shapes:
        size = int(np.prod(shape))
        params.append(flat[pos : pos + size].reshape(shape))
        pos += size
    n1 = 2 * len(config.theta1_layers)
    return SurrogateModel(
        config=config,
        theta1=params[:n1],
        theta2=params[n1:],
        init_seed=int(header.get("init_seed", 0)),
    )


def _check_labels(labels: list[str]) -> None:
    for label in labels:
        if "," in label or "\n" in label:
            raise FormatError(f"label {label!r} may not contain commas or newlines")


def write_features(
    path: str | Path, features: np.ndarray, categories: list[str] | None = None
) -> None:
    """CSV with one stimulus per row: f0,f1,...[,category]."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    header = [f"f{j}" for j in range(features.shape[1])]
    if categories is not None:
        if len(categories) != features.shape[0]:
            raise FormatError(
                f"{len(categories)} categories for {features.shape[0]} rows"
            )
        _check_labels(categories)
        header.append("category")
    lines = [",".join(header)]
    for i, row in enumerate(features):
        cells = [repr(float(v)) for v in row]
        if categories is not None:
            cells.append(categories[i])
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_features(path: str | Path) -> tuple[np.ndarray, list[str] | None]:
    """Read a feature CSV; returns (matrix, categories or None)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise FormatError(f"{path}: empty feature file")
    header = lines[0].split(",")
    has_cat = header and header[-1] == "category"
    n_feat = len(header) - 1 if has_cat else len(header)
    if header[:n_feat] != [f"f{j}" for j in range(n_feat)]:
        raise FormatError(f"{path}: unexpected header {header[:4]}...")
    rows = []
    cats: list[str] | None = [] if has_cat else None
    for ln_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(
                f"{path}:{ln_no}: expected {len(header)} cells, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells[:n_feat]])
        except ValueError as exc:
            raise FormatError(f"{path}:{ln_no}: {exc}") from None
        if has_cat:
            cats.append(cells[-1])
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64), cats


def write_p300(
    path: str | Path,
    signals: np.ndarray,
    amplitudes: np.ndarray,
    categories: list[str],
) -> None:
    """CSV of per-trial signal targets: s0,...,s{K-1},amplitude,category."""
    signals = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    amplitudes = np.asarray(amplitudes, dtype=np.float64).reshape(-1)
    if signals.shape[0] != amplitudes.size or signals.shape[0] != len(categories):
        raise FormatError(
            f"row mismatch: {signals.shape[0]} signals, {amplitudes.size} "
            f"amplitudes, {len(categories)} categories"
        )
    _check_labels(categories)
    header = [f"s{j}" for j in range(signals.shape[1])] + ["amplitude", "category"]
    lines = [",".join(header)]
    for row, amp, cat in zip(signals, amplitudes, categories):
        lines.append(
            ",".join([repr(float(v)) for v in row] + [repr(float(amp)), cat])
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_p300(path: str | Path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Read a per-trial signal CSV; returns (signals, amplitudes, categories)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise FormatError(f"{path}: empty signal file")
    header = lines[0].split(",")
    if len(header) < 2 or header[-2:] != ["amplitude", "category"]:
        raise FormatError(f"{path}: unexpected header {header[-2:]}")
    n_sig = len(header) - 2
    if header[:n_sig] != [f"s{j}" for j in range(n_sig)]:
        raise FormatError(f"{path}: unexpected signal columns")
    signals, amps, cats = [], [], []
    for ln_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(
                f"{path}:{ln_no}: expected {len(header)} cells, got {len(cells)}"
            )
        try:
            signals.append([float(c) for c in cells[:n_sig]])
            amps.append(float(cells[n_sig]))
        except ValueError as exc:
            raise FormatError(f"{path}:{ln_no}: {exc}") from None
        cats.append(cells[-1])
    if not signals:
        raise FormatError(f"{path}: no data rows")
    return (
        np.asarray(signals, dtype=np.float64),
        np.asarray(amps, dtype=np.float64),
        cats,
    )


def write_json(path: str | Path, doc: dict) -> None:
    """Pretty, key-sorted JSON with a trailing newline."""
    Path(path).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def read_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: bad JSON: {exc}") from None


def write_history(path: str | Path, stages: dict[str, list[float]]) -> None:
    """Loss history CSV: stage,epoch,loss."""
    lines = ["stage,epoch,loss"]
    for stage, losses in stages.items():
        for epoch, loss in enumerate(losses):
            lines.append(f"{stage},{epoch},{repr(float(loss))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
