"""PLY point-cloud I/O (ASCII and binary little-endian).

Clouds are stored as a single ``vertex`` element with float32 properties
x, y, z plus optional per-point scalar properties, e.g. ``traversability``
(float) and ``class_ordinal`` (uchar) for map exports, or ``hazard``
(float) for terrain exports.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .geometry import FRAME_MAP, PointCloud

_PLY_TYPES = {
    "float": np.dtype("<f4"),
    "float32": np.dtype("<f4"),
    "double": np.dtype("<f8"),
    "float64": np.dtype("<f8"),
    "uchar": np.dtype("u1"),
    "uint8": np.dtype("u1"),
    "int": np.dtype("<i4"),
    "int32": np.dtype("<i4"),
}

_DTYPE_NAMES = {
    np.dtype("<f4"): "float",
    np.dtype("<f8"): "double",
    np.dtype("u1"): "uchar",
    np.dtype("<i4"): "int",
}


def write_ply(path, xyz, extra: dict[str, np.ndarray] | None = None, *, binary: bool = True) -> None:
    """Write points (and optional extra per-point properties) to a PLY file."""
    xyz = np.asarray(xyz, dtype=np.float64)
    if xyz.ndim != 2 or xyz.shape[1] != 3:
        raise ParseError(f"expected (N, 3) points, got {xyz.shape}")
    n = xyz.shape[0]
    columns: list[tuple[str, np.ndarray]] = [
        ("x", xyz[:, 0].astype("<f4")),
        ("y", xyz[:, 1].astype("<f4")),
        ("z", xyz[:, 2].astype("<f4")),
    ]
    for name, values in (extra or {}).items():
        arr = np.asarray(values)
        if arr.shape != (n,):
            raise ParseError(f"property {name!r} has shape {arr.shape}, expected ({n},)")
        if arr.dtype == np.uint8:
            columns.append((name, arr.astype("u1")))
        else:
            columns.append((name, arr.astype("<f4")))

    fmt = "binary_little_endian" if binary else "ascii"
    header = ["ply", f"format {fmt} 1.0", f"element vertex {n}"]
    for name, arr in columns:
        header.append(f"property {_DTYPE_NAMES[arr.dtype]} {name}")
    header.append("end_header")

    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            rec = np.empty(n, dtype=[(name, arr.dtype) for name, arr in columns])
            for name, arr in columns:
                rec[name] = arr
            fh.write(rec.tobytes())
        else:
            for i in range(n):
                parts = []
                for _, arr in columns:
                    v = arr[i]
                    parts.append(str(int(v)) if arr.dtype == np.uint8 else f"{float(v):.9g}")
                fh.write((" ".join(parts) + "\n").encode("ascii"))


def read_ply(path) -> dict[str, np.ndarray]:
    """Read a single-vertex-element PLY file.

    Returns a dict with key ``"xyz"`` ((N, 3) float64) plus one float64
    array per additional property.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.find(b"end_header\n")
    if not data.startswith(b"ply") or end < 0:
        raise ParseError("not a PLY file (missing magic or end_header)")
    header_lines = data[:end].decode("ascii", errors="replace").splitlines()
    body = data[end + len(b"end_header\n"):]

    fmt = None
    count = None
    props: list[tuple[str, np.dtype]] = []
    in_vertex = False
    for line in header_lines[1:]:
        tokens = line.split()
        if not tokens or tokens[0] == "comment":
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported PLY format: {line!r}")
            fmt = tokens[1]
        elif tokens[0] == "element":
            if len(tokens) != 3:
                raise ParseError(f"malformed element line: {line!r}")
            if tokens[1] == "vertex":
                in_vertex = True
                count = int(tokens[2])
            else:
                if int(tokens[2]) != 0:
                    raise ParseError(f"unsupported non-empty element {tokens[1]!r}")
                in_vertex = False
        elif tokens[0] == "property":
            if not in_vertex:
                continue
            if tokens[1] == "list":
                raise ParseError("list properties are not supported")
            if len(tokens) != 3 or tokens[1] not in _PLY_TYPES:
                raise ParseError(f"unsupported property line: {line!r}")
            props.append((tokens[2], _PLY_TYPES[tokens[1]]))
    if fmt is None or count is None:
        raise ParseError("PLY header lacks format or vertex element")
    names = [name for name, _ in props]
    if not {"x", "y", "z"}.issubset(names):
        raise ParseError("vertex element must carry x, y, z properties")

    if fmt == "binary_little_endian":
        dtype = np.dtype([(name, dt) for name, dt in props])
        expected = count * dtype.itemsize
        if len(body) < expected:
            raise ParseError(f"truncated PLY body: {len(body)} < {expected} bytes")
        rec = np.frombuffer(body[:expected], dtype=dtype)
        table = {name: rec[name].astype(np.float64) for name in names}
    else:
        rows = body.decode("ascii", errors="replace").split()
        expected_vals = count * len(props)
        if len(rows) < expected_vals:
            raise ParseError("truncated ASCII PLY body")
        try:
            flat = np.asarray(rows[:expected_vals], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"bad ASCII PLY value: {exc}") from None
        flat = flat.reshape(count, len(props))
        table = {name: flat[:, i] for i, name in enumerate(names)}

    xyz = np.stack([table.pop("x"), table.pop("y"), table.pop("z")], axis=1)
    if not np.all(np.isfinite(xyz)):
        raise ParseError("PLY points contain NaN or Inf")
    out: dict[str, np.ndarray] = {"xyz": xyz}
    out.update(table)
    return out


def save_cloud(path, cloud: PointCloud, *, binary: bool = True) -> None:
    write_ply(path, cloud.xyz, binary=binary)


def load_cloud(path, frame: str = FRAME_MAP) -> PointCloud:
    return PointCloud(read_ply(path)["xyz"], frame=frame)
