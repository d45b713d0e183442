"""
Periocular verification evaluation toolkit.

This package measures whether attribute normalization (eyeglasses removal,
gaze correction) reduces within-class variability of periocular images, by
extracting handcrafted or ingested deep features, matching pairs under an
all-against-all protocol and scoring the results with Decidability and AUC.
"""

__version__ = "0.1.0"
