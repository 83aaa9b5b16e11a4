"""Projective cuboid geometry: vanishing-point losses, homography warping, compact bilinear pooling."""

from .cuboid import Box2D, Cuboid2D, Direction, Face, Frame, direction_edges, face_quad, from_roi_relative, to_roi_relative
from .errors import (
    BehindCamera,
    DegenerateConfiguration,
    DegenerateLine,
    DegenerateQuad,
    DimensionMismatch,
    FrameError,
    GeometryError,
    NoPositives,
    ParallelLines,
    ZeroVector,
)
from .fusion import SketchPlan, concat, count_sketch, mcb_pool
from .metrics import PckConfig, PrPoint, cosine_similarity, cuboid_quality, pck, pr_curve
from .projective import Line2H, Point2, concurrency_det, line_through, lines_intersection
from .refine import RefineConfig, refine_cuboid, refinement_study
from .synth import Box3D, Camera, perturb, project_cuboid, random_scene
from .vploss import LossValue, LossWeights, loss_3dbranch, smooth_l1, vp_loss, vp_loss_direction
from .warp import bilinear_sample, dlt_homography, perspective_roi, roi_align

__version__ = "0.1.0"
