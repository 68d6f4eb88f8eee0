"""Ensemble snapshot directory: one network file per member + a manifest.

    <dir>/manifest.json     m, seeds, widening, config and its sha256 hash
    <dir>/member_<i>.txt    network snapshot of member i
"""

from pathlib import Path

from pydantic import ValidationError

from ubpi.ensemble import Ensemble
from ubpi.errors import NotFoundError, SnapshotError
from ubpi.models.snapshot import load_snapshot, save_snapshot
from ubpi.schemas.ensemble import EnsembleManifest
from ubpi.schemas.train import TrainConfig

import hashlib


MANIFEST = "manifest.json"


def member_name(i: int) -> str:
    return f"member_{i}.txt"


def config_hash(config: TrainConfig) -> str:
    return hashlib.sha256(config.model_dump_json().encode()).hexdigest()


def save_ensemble(directory: str | Path, ensemble: Ensemble) -> Path:
    """Write the ensemble into `directory` (created if missing)."""

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    names = [member_name(i) for i in range(ensemble.m)]

    for name, params in zip(names, ensemble.members):
        save_snapshot(directory / name, params, ensemble.standardizer)

    manifest = EnsembleManifest(
        m=ensemble.m,
        seeds=ensemble.seeds,
        config_hash=config_hash(ensemble.config),
        config=ensemble.config,
        widening=ensemble.widening,
        split_seed=ensemble.split_seed,
        train_fraction=ensemble.train_fraction,
        members=names,
    )
    (directory / MANIFEST).write_text(
        manifest.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )

    return directory


def load_ensemble(directory: str | Path) -> Ensemble:
    """Read an ensemble written by `save_ensemble`.

    Raises:
        NotFoundError: if the directory or its manifest is missing.
        SnapshotError: if the manifest is malformed, its hash does not match \
            its config, a member file name is not `member_<i>.txt`, or the \
            member files disagree with each other.
    """

    directory = Path(directory)
    path = directory / MANIFEST

    if not path.is_file():
        raise NotFoundError(f"no ensemble manifest in {directory}")

    try:
        manifest = EnsembleManifest.model_validate_json(
            path.read_text(encoding="utf-8")
        )
    except ValidationError as e:
        raise SnapshotError(f"malformed ensemble manifest {path}: {e}")

    if config_hash(manifest.config) != manifest.config_hash:
        raise SnapshotError(f"config hash mismatch in {path}")

    if {len(manifest.members), len(manifest.seeds)} != {manifest.m}:
        raise SnapshotError(f"member count mismatch in {path}")

    for i, name in enumerate(manifest.members):
        if name != member_name(i):
            raise SnapshotError(
                f"member {i} of {path} must be stored as {member_name(i)}, "
                f"not {name!r}"
            )

    loaded = [load_snapshot(directory / name) for name in manifest.members]
    dims = {params.input_dim for params, _ in loaded}

    if len(dims) != 1:
        raise SnapshotError(f"members of {directory} disagree on input size")

    return Ensemble(
        members=[params for params, _ in loaded],
        seeds=manifest.seeds,
        config=manifest.config,
        widening=manifest.widening,
        standardizer=loaded[0][1],
        split_seed=manifest.split_seed,
        train_fraction=manifest.train_fraction,
    )
