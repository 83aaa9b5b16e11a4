"""File formats: cuboid/scene/report JSON, the FMAP feature-map binary, PPM rasters.

Cuboid JSON::

    {"frame": "image", "vertices": [[x, y], ... 8], "bbox2d": [x, y, w, h]}

``frame`` is ``"image"`` or ``"roi_relative"``; ``bbox2d`` is optional.
A scenes file is ``{"count": N, "seed": S, "scenes": [...]}`` where each
scene is a cuboid object extended with ``index``, ``camera`` and ``box3d``.

FMAP: ``b"FMAP"``, then uint32 LE height, width, channels, then
``H*W*C`` float32 LE values, row-major, channel-minor.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .cuboid import Box2D, Cuboid2D, Frame
from .synth import Box3D, Camera, Scene

FMAP_MAGIC = b"FMAP"
_HEADER = struct.Struct("<4sIII")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        # fold -0.0 so equal geometry always serializes identically
        return float(obj) + 0.0
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def cuboid_to_dict(c: Cuboid2D, bbox: Box2D | None = None) -> dict:
    d = {"frame": c.frame.value, "vertices": c.vertices.tolist()}
    if bbox is not None:
        d["bbox2d"] = bbox.as_list()
    return d


def cuboid_from_dict(d: dict) -> tuple[Cuboid2D, Box2D | None]:
    try:
        frame = Frame(d.get("frame", "image"))
        verts = np.asarray(d["vertices"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid cuboid JSON: {exc}") from None
    if verts.shape != (8, 2):
        raise ValueError(f"cuboid needs 8 [x, y] vertices, got shape {verts.shape}")
    bbox = Box2D(*map(float, d["bbox2d"])) if d.get("bbox2d") is not None else None
    return Cuboid2D(verts, frame), bbox


def scene_to_dict(scene: Scene, index: int) -> dict:
    d = cuboid_to_dict(scene.cuboid, scene.bbox)
    d.update(index=index, camera=scene.camera.to_dict(), box3d=scene.box.to_dict())
    return d


def scene_from_dict(d: dict) -> Scene:
    cub, bbox = cuboid_from_dict(d)
    if bbox is None:
        bbox = Box2D.bounding(cub.vertices)
    return Scene(Box3D.from_dict(d["box3d"]), Camera.from_dict(d["camera"]), cub, bbox)


def read_scenes(path) -> list[Scene]:
    data = read_json(path)
    if isinstance(data, dict) and "scenes" in data:
        data = data["scenes"]
    return [scene_from_dict(d) for d in data]


def write_fmap(path, f: np.ndarray) -> None:
    f = np.asarray(f)
    if f.ndim == 2:
        f = f[..., None]
    h, w, c = f.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FMAP_MAGIC, h, w, c))
        fh.write(np.ascontiguousarray(f, dtype="<f4").tobytes())


def read_fmap(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("truncated FMAP header")
    magic, h, w, c = _HEADER.unpack_from(raw)
    if magic != FMAP_MAGIC:
        raise ValueError(f"bad FMAP magic {magic!r}")
    n = h * w * c
    body = raw[_HEADER.size :]
    if len(body) != 4 * n:
        raise ValueError(f"FMAP body holds {len(body)} bytes, expected {4 * n}")
    data = np.frombuffer(body, dtype="<f4").astype(np.float64).reshape(h, w, c)
    if not np.all(np.isfinite(data)):
        raise ValueError("FMAP contains non-finite values")
    return data


def read_ppm(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.format not in ("PPM", "PGM", "PBM"):
            raise ValueError(f"{path} is not a PPM/PGM image")
        return np.asarray(im.convert("RGB"))


def write_rows_csv(path, rows: list[dict]) -> None:
    """Per-scene rows as comma-delimited text, columns sorted by name."""
    import csv

    cols = sorted({k for r in rows for k in r})
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
