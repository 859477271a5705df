"""Flood scenario imagery toolkit.

Turns a pre-event satellite tile plus a binary hazard mask into a
photorealistic post-event tile (conditional GAN or deterministic
baselines) and scores the result for photorealism and physical
consistency (IoU, perceptual distance, FVPS).
"""

from floodgen.types import BinaryMask, ImageTile, Manifest, TripletRecord

__all__ = ["ImageTile", "BinaryMask", "TripletRecord", "Manifest"]

__version__ = "0.1.0"
