"""Residual report container shared by the check operations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ResidualReport:
    op: str
    max: float
    l2: float
    grid: tuple
    meta: dict = field(default_factory=dict)
    data: object = None

    @classmethod
    def from_array(cls, op, arr, grid=None, **meta):
        arr = np.asarray(arr)
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        mag = np.abs(arr)
        return cls(
            op=op,
            max=float(np.max(mag)) if arr.size else 0.0,
            l2=float(np.sqrt(np.mean(mag**2))) if arr.size else 0.0,
            grid=tuple(grid) if grid is not None else tuple(arr.shape),
            meta=dict(meta),
            data=arr,
        )

    def to_json(self) -> str:
        return json.dumps(
            {"op": self.op, "max": self.max, "l2": self.l2,
             "grid": list(self.grid), **self.meta},
            sort_keys=True,
        )
