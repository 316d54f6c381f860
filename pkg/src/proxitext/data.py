"""Column-role dataset container and its CSV round-trip.

A :class:`Dataset` holds the treatment/outcome/covariate columns plus
optional binary proxies, an optional binary oracle column, and optional
named feature blocks (matrix-valued stand-ins for per-unit text). All
numeric payloads are float64 numpy arrays; binary columns contain only
0.0 and 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import DegenerateProxyError

BLOCK_KEYS = ("train1", "train2", "inf1", "inf2")


def as_binary(values, name: str) -> np.ndarray:
    col = np.asarray(values, dtype=float)
    if not np.isin(col, (0.0, 1.0)).all():
        raise ValueError(f"column {name!r} must contain only 0/1 values")
    return col


def check_not_constant(col: np.ndarray, name: str) -> np.ndarray:
    if col.min() == col.max():
        raise DegenerateProxyError(f"degenerate proxy: column {name!r} is constant")
    return col


@dataclass(frozen=True)
class Dataset:
    a: np.ndarray
    y: np.ndarray
    c: dict[str, np.ndarray]
    w: np.ndarray | None = None
    z: np.ndarray | None = None
    u: np.ndarray | None = None
    blocks: dict[str, np.ndarray] = field(default_factory=dict)
    block_features: tuple[str, ...] = ()

    def __post_init__(self):
        a = as_binary(self.a, "A")
        y = np.asarray(self.y, dtype=float)
        n = a.shape[0]
        if y.shape != (n,):
            raise ValueError("Y length does not match A")
        cov = {k: np.asarray(v, dtype=float) for k, v in self.c.items()}
        for k, v in cov.items():
            if v.shape != (n,):
                raise ValueError(f"covariate {k!r} length mismatch")
        for arr in (y, *cov.values()):
            if not np.all(np.isfinite(arr)):
                raise ValueError("dataset contains non-finite values")
        w = as_binary(self.w, "W") if self.w is not None else None
        z = as_binary(self.z, "Z") if self.z is not None else None
        u = as_binary(self.u, "U") if self.u is not None else None
        for name, col in (("W", w), ("Z", z), ("U", u)):
            if col is not None and col.shape != (n,):
                raise ValueError(f"{name} length mismatch")
        if w is not None and z is not None:
            check_not_constant(w, "W")
            check_not_constant(z, "Z")
        blocks = {k: np.asarray(v, dtype=float) for k, v in self.blocks.items()}
        for k, v in blocks.items():
            if v.ndim != 2 or v.shape[0] != n:
                raise ValueError(f"block {k!r} must be an (n, k) matrix")
            if self.block_features and v.shape[1] != len(self.block_features):
                raise ValueError(f"block {k!r} width does not match feature names")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"block {k!r} contains non-finite values")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "c", cov)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_features", tuple(self.block_features))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def covariate_names(self) -> tuple[str, ...]:
        return tuple(self.c)

    def column(self, name: str) -> np.ndarray:
        """Resolve a column by covariate name or role letter (A/Y/U/W/Z)."""
        if name in self.c:
            return self.c[name]
        roles = {"A": self.a, "Y": self.y, "U": self.u, "W": self.w, "Z": self.z}
        if name in roles:
            if roles[name] is None:
                raise KeyError(f"column {name!r} not attached to this dataset")
            return roles[name]
        raise KeyError(f"unknown column {name!r}")

    def with_proxies(self, w=None, z=None) -> "Dataset":
        """Return a copy with proxy columns attached (validated non-constant)."""
        neww = self.w if w is None else check_not_constant(as_binary(w, "W"), "W")
        newz = self.z if z is None else check_not_constant(as_binary(z, "Z"), "Z")
        return replace(self, w=neww, z=newz)

    def covariates(self, names=None) -> dict[str, np.ndarray]:
        names = self.covariate_names if names is None else tuple(names)
        return {k: self.c[k] for k in names}


def _block_column(feature: str, block: str) -> str:
    return f"{feature}_{block}"


CSV_SCHEMA = "proxitext-data/v1"


def write_csv(data: Dataset, path) -> None:
    """Write a dataset to CSV with a leading schema comment line.

    Binary columns are written as integers; floats carry 17 significant
    digits so values survive the round trip bit-exactly.
    """
    cols: dict[str, np.ndarray] = {"A": data.a.astype(int), "Y": data.y}
    if data.u is not None:
        cols["U"] = data.u.astype(int)
    for k, v in data.c.items():
        cols[k] = v
    if data.w is not None:
        cols["W"] = data.w.astype(int)
    if data.z is not None:
        cols["Z"] = data.z.astype(int)
    for block, mat in data.blocks.items():
        for j, feat in enumerate(data.block_features):
            cols[_block_column(feat, block)] = mat[:, j]
    # 17 significant digits: float64 values survive the text round trip exactly
    pd.DataFrame(cols).to_csv(path, index=False, float_format="%.17g")


def read_csv(
    path,
    a_col: str = "A",
    y_col: str = "Y",
    u_col: str | None = None,
    w_col: str | None = None,
    z_col: str | None = None,
    covariates=None,
) -> Dataset:
    """Load a dataset from CSV.

    Feature-block columns are recognized by the ``<feature>_<block>`` naming
    convention with block in {train1, train2, inf1, inf2}. When
    ``covariates`` is None, every remaining numeric column becomes a
    covariate. Floats parse with the correctly-rounded parser so a
    write/read cycle is lossless.
    """
    frame = pd.read_csv(path, float_precision="round_trip")
    if u_col is None and "U" in frame.columns:
        u_col = "U"
    taken = {a_col, y_col} | {c for c in (u_col, w_col, z_col) if c}
    block_cols: dict[str, dict[str, np.ndarray]] = {}
    feature_order: list[str] = []
    for col in frame.columns:
        if col in taken:
            continue
        feat, _, block = col.rpartition("_")
        if feat and block in BLOCK_KEYS:
            block_cols.setdefault(block, {})[feat] = frame[col].to_numpy(float)
            if feat not in feature_order:
                feature_order.append(feat)
            taken.add(col)
    if covariates is None:
        covariates = [c for c in frame.columns if c not in taken]
    blocks = {
        b: np.column_stack([cols[f] for f in feature_order])
        for b, cols in block_cols.items()
    }
    return Dataset(
        a=frame[a_col].to_numpy(float),
        y=frame[y_col].to_numpy(float),
        c={c: frame[c].to_numpy(float) for c in covariates},
        u=frame[u_col].to_numpy(float) if u_col else None,
        w=frame[w_col].to_numpy(float) if w_col else None,
        z=frame[z_col].to_numpy(float) if z_col else None,
        blocks=blocks,
        block_features=tuple(feature_order) if blocks else (),
    )
