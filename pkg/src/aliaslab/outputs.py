"""Artifact writers: profile CSV, 16-bit PGM images with text sidecars,
and psi tables.

All text outputs are UTF-8 with LF line endings; floats are written via
repr (shortest decimal that round-trips), so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .reconstruction import AliasProfile, ImageGrid

__all__ = [
    "PROFILE_HEADER",
    "write_profile_csv",
    "write_psi_table_csv",
    "write_pgm16",
    "read_profile_csv",
]

PROFILE_HEADER = "h,recon_scaled_diff,prediction"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_profile_csv(path, profile: AliasProfile) -> None:
    if profile.predicted is None:
        raise ValueError("profile prediction not filled in")
    lines = [PROFILE_HEADER]
    for h, rec, pred in zip(profile.h, profile.recon_scaled, profile.predicted):
        lines.append(f"{_fmt(h)},{_fmt(rec)},{_fmt(pred)}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_profile_csv(path) -> AliasProfile:
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip()
        if header != PROFILE_HEADER:
            raise ValueError(f"unexpected profile header: {header!r}")
        rows = np.array([[float(c) for c in line.split(",")] for line in f if line.strip()])
    return AliasProfile(
        x0=(0.0, 0.0),
        theta=(1.0, 0.0),
        h=rows[:, 0],
        recon_scaled=rows[:, 1],
        predicted=rows[:, 2],
    )


def write_psi_table_csv(path, rows) -> None:
    """rows: iterable of (h_prime, a, psi_value)."""
    lines = ["h_prime,a,psi_value"]
    for h_prime, a, value in rows:
        lines.append(f"{_fmt(h_prime)},{_fmt(a)},{_fmt(value)}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_pgm16(path, image: ImageGrid) -> None:
    """Binary PGM (P5, maxval 65535, big-endian) plus a text sidecar
    recording the geometry and the linear value window used."""
    values = image.values
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax > vmin:
        scaled = np.round((values - vmin) / (vmax - vmin) * 65535.0)
    else:
        scaled = np.zeros_like(values)
    pixels = scaled.astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P5\n{image.width} {image.height}\n65535\n".encode("ascii"))
        f.write(pixels.tobytes())
    sidecar = [
        "# image sidecar",
        f"origin = {_fmt(image.origin[0])},{_fmt(image.origin[1])}",
        f"pixel_size = {_fmt(image.pixel_size)}",
        f"width = {image.width}",
        f"height = {image.height}",
        f"value_min = {_fmt(vmin)}",
        f"value_max = {_fmt(vmax)}",
        "row_order = first row at lowest y",
    ]
    with open(str(path) + ".txt", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(sidecar) + "\n")
