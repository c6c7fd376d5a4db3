"""Checkpoint persistence: one .npz archive holding a JSON meta block
(format version, model config, optional extras) plus named weight arrays."""

from __future__ import annotations

import json

import numpy as np

from .config import ModelConfig
from .network import Params

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_model(
    path: str,
    config: ModelConfig,
    params: Params,
    extra: dict | None = None,
    opt_state: dict | None = None,
) -> None:
    meta = {
        "version": FORMAT_VERSION,
        "config": config.to_dict(),
        "extra": extra or {},
    }
    arrays = {f"param/{k}": v for k, v in params.items()}
    if opt_state is not None:
        arrays.update({f"opt_m/{k}": v for k, v in opt_state["m"].items()})
        arrays.update({f"opt_v/{k}": v for k, v in opt_state["v"].items()})
        meta["opt"] = {k: v for k, v in opt_state.items() if k not in ("m", "v")}
    np.savez(path, meta=np.array(json.dumps(meta, sort_keys=True)), **arrays)


def load_model(path: str) -> tuple[ModelConfig, Params, dict, dict | None]:
    """Returns (config, params, extra, opt_state-or-None)."""
    with np.load(path, allow_pickle=False) as data:
        if "meta" not in data:
            raise CheckpointError(f"{path}: not a model checkpoint (no meta block)")
        meta = json.loads(str(data["meta"]))
        if meta.get("version") != FORMAT_VERSION:
            raise CheckpointError(
                f"{path}: unsupported checkpoint version {meta.get('version')!r}"
            )
        config = ModelConfig.from_dict(meta["config"])
        params = {
            k[len("param/"):]: data[k] for k in data.files if k.startswith("param/")
        }
        opt_state = None
        if "opt" in meta:
            opt_state = dict(meta["opt"])
            opt_state["m"] = {
                k[len("opt_m/"):]: data[k] for k in data.files if k.startswith("opt_m/")
            }
            opt_state["v"] = {
                k[len("opt_v/"):]: data[k] for k in data.files if k.startswith("opt_v/")
            }
    return config, params, meta.get("extra", {}), opt_state
