"""Plain-text snapshot of one network plus its standardization constants.

Layout, one `key=value` pair per line, in this order:

    format=ubpi-network
    version=1
    input_dim=<int>
    hidden=<int>
    w1=<input_dim*hidden hex floats, row-major>
    b1=<hidden hex floats>
    w2=<hidden*2 hex floats, row-major>
    b2=<2 hex floats>
    standardized=<true|false>
    feature_mean=<input_dim hex floats>     (only when standardized)
    feature_std=<input_dim hex floats>      (only when standardized)
    target_mean=<hex float>                 (only when standardized)
    target_std=<hex float>                  (only when standardized)

Reals are written with `float.hex` so a snapshot round-trips bit-exactly.
"""

from pathlib import Path

from numpy.typing import NDArray

from ubpi.data.standardize import Standardizer
from ubpi.errors import NotFoundError, SnapshotError
from ubpi.models.network import NetworkParams

import numpy as np


FORMAT = "ubpi-network"
VERSION = 1


def _encode(array: NDArray[np.float64]) -> str:
    return " ".join(float(v).hex() for v in np.asarray(array).reshape(-1))


def _decode(
    fields: dict[str, str], key: str, shape: tuple[int, ...]
) -> NDArray[np.float64]:
    if key not in fields:
        raise SnapshotError(f"snapshot is missing `{key}`")

    try:
        values = [float.fromhex(v) for v in fields[key].split()]
    except ValueError as e:
        raise SnapshotError(f"snapshot field `{key}` is malformed: {e}")

    expected = int(np.prod(shape))

    if len(values) != expected:
        raise SnapshotError(
            f"snapshot field `{key}` has {len(values)} values, expected "
            f"{expected}"
        )

    return np.array(values, dtype=np.float64).reshape(shape)


def dumps(
    params: NetworkParams, standardizer: Standardizer | None = None
) -> str:
    lines = [
        f"format={FORMAT}",
        f"version={VERSION}",
        f"input_dim={params.input_dim}",
        f"hidden={params.hidden}",
    ]

    for name, array in params.as_dict().items():
        lines.append(f"{name}={_encode(array)}")

    lines.append(f"standardized={'true' if standardizer else 'false'}")

    if standardizer is not None:
        lines += [
            f"feature_mean={_encode(standardizer.feature_mean)}",
            f"feature_std={_encode(standardizer.feature_std)}",
            f"target_mean={float(standardizer.target_mean).hex()}",
            f"target_std={float(standardizer.target_std).hex()}",
        ]

    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[NetworkParams, Standardizer | None]:
    fields: dict[str, str] = {}

    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue

        key, sep, value = line.partition("=")

        if not sep:
            raise SnapshotError(f"snapshot line {number} has no `=`")

        fields[key.strip()] = value.strip()

    if fields.get("format") != FORMAT:
        raise SnapshotError("not a network snapshot")

    if fields.get("version") != str(VERSION):
        raise SnapshotError(
            f"unsupported snapshot version {fields.get('version')!r}"
        )

    try:
        input_dim = int(fields["input_dim"])
        hidden = int(fields["hidden"])
    except (KeyError, ValueError) as e:
        raise SnapshotError(f"snapshot dimensions are malformed: {e}")

    params = NetworkParams(
        w1=_decode(fields, "w1", (input_dim, hidden)),
        b1=_decode(fields, "b1", (hidden,)),
        w2=_decode(fields, "w2", (hidden, 2)),
        b2=_decode(fields, "b2", (2,)),
    )

    if fields.get("standardized") != "true":
        return params, None

    standardizer = Standardizer(
        feature_mean=_decode(fields, "feature_mean", (input_dim,)),
        feature_std=_decode(fields, "feature_std", (input_dim,)),
        target_mean=float(_decode(fields, "target_mean", (1,))[0]),
        target_std=float(_decode(fields, "target_std", (1,))[0]),
    )

    return params, standardizer


def save_snapshot(
    path: str | Path,
    params: NetworkParams,
    standardizer: Standardizer | None = None,
) -> Path:
    path = Path(path)
    path.write_text(dumps(params, standardizer), encoding="utf-8")

    return path


def load_snapshot(
    path: str | Path,
) -> tuple[NetworkParams, Standardizer | None]:
    path = Path(path)

    if not path.is_file():
        raise NotFoundError(f"snapshot {path} not found")

    return loads(path.read_text(encoding="utf-8"))
