# Copyright (c) 2024 Contributors
# All rights reserved.

import os
import pathlib

import msgspec


class Settings(msgspec.Struct, frozen=True, kw_only=True):
    """Guards, budgets and parallelism for every exact computation.

    Exceeding a guard raises GuardExceeded; nothing is ever truncated.

    Attributes:
        budget: cap on enumerated points for counting kernels.
        workers: processes used by counting kernels.
        slice_max_dim: largest mode size for slice-rank style searches.
        slice_max_field: largest field size for slice-rank style searches.
        partition_max_side: largest flattened side for partition-rank search.
        cp_max_terms: cap on projective rank-one tensors for cp-rank search.
        subrank_max_space: cap on q^(s * sum n_i) for subrank search.
        subspace_budget: cap on k-dimensional subspaces visited by SR_k.
        subspace_max_ambient: largest ambient dimension for enumeration.
        subspace_max_points: cap on q^n for enumeration.
    """
    budget: int = 2 ** 34
    workers: int = 1
    slice_max_dim: int = 4
    slice_max_field: int = 3
    partition_max_side: int = 4
    cp_max_terms: int = 10 ** 4
    subrank_max_space: int = 2 ** 24
    subspace_budget: int = 10 ** 4
    subspace_max_ambient: int = 6
    subspace_max_points: int = 4096


DEFAULT_SETTINGS = Settings()


def all_cores() -> int:
    return os.cpu_count() or 1


def load_settings(path: str | os.PathLike | None = None, **overrides) -> Settings:
    """Reads a TOML settings file (if given) and applies keyword overrides.

    Overrides set to None are ignored so CLI flags can be passed straight through.
    """
    settings = DEFAULT_SETTINGS
    if path is not None:
        settings = msgspec.toml.decode(pathlib.Path(path).read_bytes(), type=Settings)
    changes = {key: value for key, value in overrides.items() if value is not None}
    return msgspec.structs.replace(settings, **changes) if changes else settings
