"""Foreground extraction from a noisy image by minimum cut.

Each pixel is a grid vertex.  Bright pixels hang off a pendant source and
dark ones off a pendant sink, so the problem has many sources and sinks
and stays planar.

    python3 demos/04_segmentation.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from planarflow.segment import segment_image, write_pgm

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
out.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(0)
truth = np.zeros((32, 32), dtype=bool)
truth[8:24, 6:20] = True
yy, xx = np.mgrid[:32, :32]
truth |= (yy - 12) ** 2 + (xx - 24) ** 2 < 25
img = np.where(truth, 180.0, 70.0) + rng.normal(0, 45, truth.shape)
img = np.clip(img, 0, 255).astype(np.uint8)

thresholded = img > 125
print(f"threshold alone: {(thresholded == truth).mean():.1%} of pixels right")
for smooth in (10, 40, 80):
    seg = segment_image(img, threshold=125, smoothness=smooth, sigma=60)
    print(f"smoothness {smooth:>2}: {(seg.mask == truth).mean():.1%} right, cut value {seg.value}")

write_pgm(out / "noisy.pgm", img)
write_pgm(out / "segmented.pgm", seg.mask)
print(f"wrote {out / 'noisy.pgm'} and {out / 'segmented.pgm'}")
