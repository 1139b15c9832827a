"""Regenerate tests/data/*.ppm from photos bundled with scikit-image.

Only needed to rebuild the checked-in corpus; scikit-image is not a
runtime dependency.
"""
import pathlib

import numpy as np
from skimage import data, transform

from graphseg.imaging import RasterImage, save_ppm

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data"

# (name, loader, width, height); sizes follow the 16:9 ladder 128x72 .. 512x288
CORPUS = [
    ("astronaut_128x72", data.astronaut, 128, 72),
    ("chelsea_256x144", data.chelsea, 256, 144),
    ("coffee_512x288", data.coffee, 512, 288),
]


def crop_16x9(img):
    h, w = img.shape[:2]
    target_h = w * 9 // 16
    if target_h <= h:
        top = (h - target_h) // 2
        return img[top:top + target_h]
    target_w = h * 16 // 9
    left = (w - target_w) // 2
    return img[:, left:left + target_w]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, loader, w, h in CORPUS:
        img = crop_16x9(loader()[..., :3])
        small = transform.resize(img, (h, w), anti_aliasing=True, preserve_range=True)
        pixels = np.clip(np.round(small), 0, 255).astype(np.uint8)
        save_ppm(OUT / f"{name}.ppm", RasterImage(pixels))
        print(OUT / f"{name}.ppm")


if __name__ == "__main__":
    main()
