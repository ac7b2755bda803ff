"""
Reader and writer for the libSVM sparse text format:

    label index:value index:value ...

Indices in files are 1-based; internally they are 0-based CSR columns.
"""
import gzip
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Union

import numpy as np
import scipy.sparse as sp

from smsvm.core.errors import DatasetError, ParseError
from smsvm.core.types import Dataset

logger = logging.getLogger(__name__)


def _label_key(value: float) -> str:
    return f"{value:g}"


def _parse_line(text: str, lineno: int):
    tokens = text.split()
    try:
        label = float(tokens[0])
    except ValueError:
        raise ParseError(f"label {tokens[0]!r} is not numeric", lineno)

    row: Dict[int, float] = {}
    for token in tokens[1:]:
        index, sep, value = token.partition(":")
        if not sep:
            raise ParseError(f"malformed feature token {token!r}", lineno)
        try:
            j = int(index)
        except ValueError:
            raise ParseError(f"feature index {index!r} is not an integer", lineno)
        try:
            v = float(value)
        except ValueError:
            raise ParseError(f"feature value {value!r} is not numeric", lineno)
        if j < 1:
            raise ParseError(f"feature index {j} must be >= 1", lineno)
        if not np.isfinite(v):
            raise ParseError(f"feature value {value!r} is not finite", lineno)
        if j - 1 in row:
            raise ParseError(f"duplicate feature index {j}", lineno)
        row[j - 1] = v
    return label, row


def _label_mapping(classes: List[float], positive_label: Optional[float]) -> Dict[float, int]:
    if positive_label is not None:
        return {c: (1 if c == positive_label else -1) for c in classes}
    observed = set(classes)
    if observed <= {-1.0, 1.0}:
        return {c: int(c) for c in classes}
    if observed <= {0.0, 1.0}:
        logger.info("Mapping 0/1 labels to -1/+1 (0 -> -1)")
        return {0.0: -1, 1.0: 1}
    if len(observed) == 1:
        logger.warning(f"Single class {_label_key(classes[0])} found; mapping it to +1")
        return {classes[0]: 1}
    low, high = sorted(observed)
    logger.info(f"Mapping labels {_label_key(low)} -> -1 and {_label_key(high)} -> +1")
    return {low: -1, high: 1}


def parse_libsvm(
    stream: Iterable[str],
    n_features: Optional[int] = None,
    positive_label: Optional[float] = None,
    name: str = "",
    label_map: Optional[Dict[str, int]] = None,
) -> Dataset:
    """
    Parse libSVM text into a Dataset.

    Labels must come from at most two classes unless positive_label is
    given, in which case that class maps to +1 and every other class to -1.
    A label_map saved from a training file fixes the mapping instead;
    labels outside it are rejected.
    `#` starts a comment; blank lines are skipped.
    """
    labels: List[float] = []
    classes: List[float] = []
    indptr = [0]
    indices: List[int] = []
    values: List[float] = []
    max_index = -1

    for lineno, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        label, row = _parse_line(text, lineno)
        if label_map is not None and positive_label is None and _label_key(label) not in label_map:
            raise ParseError(
                f"label {_label_key(label)} is not one of the model's classes {sorted(label_map)}",
                lineno,
            )
        if label not in classes:
            if positive_label is None and label_map is None and len(classes) == 2:
                raise ParseError(
                    f"label {_label_key(label)} is outside the two observed classes "
                    f"{[_label_key(c) for c in classes]}",
                    lineno,
                )
            classes.append(label)
        if row:
            cols = sorted(row)
            if n_features is not None and cols[-1] >= n_features:
                raise ParseError(f"feature index {cols[-1] + 1} exceeds n_features={n_features}", lineno)
            max_index = max(max_index, cols[-1])
            indices.extend(cols)
            values.extend(row[j] for j in cols)
        labels.append(label)
        indptr.append(len(indices))

    if not labels:
        raise DatasetError(f"no samples found in {name or 'input'}")

    if label_map is not None and positive_label is None:
        mapping = {c: int(label_map[_label_key(c)]) for c in classes}
    else:
        mapping = _label_mapping(classes, positive_label)
    y = np.array([mapping[label] for label in labels], dtype=np.float64)
    m = n_features if n_features is not None else max(max_index + 1, 1)
    X = sp.csr_matrix(
        (np.array(values, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(labels), m),
    )
    label_map = {_label_key(c): mapping[c] for c in classes}
    return Dataset(X, y, label_map=label_map, name=name)


def load_libsvm(
    path: Union[str, Path],
    n_features: Optional[int] = None,
    positive_label: Optional[float] = None,
    label_map: Optional[Dict[str, int]] = None,
) -> Dataset:
    """Read a libSVM file; names ending in .gz are decompressed on the fly."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    name = path.name[:-len("".join(path.suffixes))] if path.suffixes else path.name
    with opener(path, "rt", encoding="ascii") as f:
        data = parse_libsvm(
            f, n_features=n_features, positive_label=positive_label, name=name, label_map=label_map
        )
    counts = data.class_counts()
    logger.info(
        f"Loaded {path}: n={data.n}, m={data.m}, nnz={data.X.nnz}, "
        f"{counts[1]} positive / {counts[-1]} negative"
    )
    return data


def write_libsvm(data: Dataset, stream: TextIO) -> None:
    """Write samples with +1/-1 labels and repr-formatted values."""
    X = data.X
    for i in range(data.n):
        start, stop = X.indptr[i], X.indptr[i + 1]
        fields = ["+1" if data.y[i] > 0 else "-1"]
        fields.extend(f"{j + 1}:{float(v)!r}" for j, v in zip(X.indices[start:stop], X.data[start:stop]))
        stream.write(" ".join(fields) + "\n")


def save_libsvm(data: Dataset, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wt", encoding="ascii") as f:
        write_libsvm(data, f)
    logger.info(f"Wrote {data.n} samples to {path}")
