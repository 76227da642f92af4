"""Walkthrough: EBSD orientation data to an IPF-Z preview image.

Builds a synthetic grain map, colors it with the cubic inverse-pole-figure
convention (001 red, 101 green, 111 blue), and writes a PNG preview plus
a thumbnail, mirroring what registration does automatically.

    python demos/03_ebsd_preview.py
"""

from pathlib import Path

from provlab import euler_to_ipf_color, ipf_z_map, parse_ang, thumbnail
from provlab.extract.fixtures import make_ang_text
from provlab.previews import EulerOrientation, to_png

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

ang_text = make_ang_text(n_cols=96, n_rows=96, n_grains=12, seed=11,
                         zero_quality_fraction=0.01)
(OUT / "scan.ang").write_text(ang_text, encoding="utf-8")

ebsd = parse_ang(ang_text)
print(f"parsed {ebsd.n_cols}x{ebsd.n_rows} scan, step {ebsd.step} m")

image = ipf_z_map(ebsd)
(OUT / "ipf_z.png").write_bytes(to_png(image))
(OUT / "ipf_z_thumb.png").write_bytes(to_png(thumbnail(image, 48)))
print("wrote", OUT / "ipf_z.png", "and a 48 px thumbnail")

# The three fundamental-zone corners, for reference:
import math
corners = {
    "[001] (red)": EulerOrientation(0.0, 0.0, 0.0),
    "[101] (green)": EulerOrientation(0.0, math.pi / 4, 0.0),
    "[111] (blue)": EulerOrientation(0.0, math.acos(1 / math.sqrt(3)), math.pi / 4),
}
for label, orientation in corners.items():
    print(f"{label}: {euler_to_ipf_color(orientation)}")
