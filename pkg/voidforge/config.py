# Configuration dataclasses
# Every tunable constant of the forge lives here with its default.

import os
from dataclasses import dataclass, field
from numbers import Integral

from voidforge.errors import RangeError

TEMPLATES = ("collision_chain", "support_removal", "obstruction_removal")


@dataclass(frozen=True)
class SamplerParams:
    """
    Ranges used when sampling a scene.

    Parameters
    ----------
    min_bodies : int
        Minimum number of bodies (including static ones), at least 3.
    max_bodies : int
        Maximum number of bodies, at most 8.
    radius_range : tuple
        Sphere radius range in meters.
    half_extent_range : tuple
        Box half extent range in meters.
    max_speed : float
        Upper bound on initial speeds in m/s.
    mass_range : tuple
        Mass range in kilograms for ordinary dynamic bodies.
    restitution_range : tuple
        Restitution range for bodies.
    frames : int
        Number of frames T.
    fps : int
        Frames per second.
    substeps : int
        Physics substeps per frame.
    resolution : tuple
        (width, height) in pixels.
    template_mix : tuple
        Integer weight per template, in the order of TEMPLATES.
    placement_retries : int
        Retry budget for non-overlapping placement.
    """
    min_bodies: int = 3
    max_bodies: int = 8
    radius_range: tuple = (0.05, 0.3)
    half_extent_range: tuple = (0.05, 0.3)
    max_speed: float = 4.0
    mass_range: tuple = (0.5, 2.0)
    restitution_range: tuple = (0.5, 1.0)
    frames: int = 49
    fps: int = 24
    substeps: int = 10
    resolution: tuple = (128, 128)
    template_mix: tuple = (1, 1, 1)
    placement_retries: int = 64

    def check(self):
        """ Raise RangeError when a parameter is out of bounds """

        if not 3 <= self.min_bodies <= self.max_bodies <= 8:
            raise RangeError(
                f"body count range must satisfy 3 <= min <= max <= 8, got "
                f"({self.min_bodies}, {self.max_bodies})")
        width, height = self.resolution
        if width < 32 or height < 32:
            raise RangeError(f"resolution must be at least 32x32, got {width}x{height}")
        for name in ("radius_range", "half_extent_range", "mass_range"):
            low, high = getattr(self, name)
            if not 0.0 < low <= high:
                raise RangeError(f"{name} must satisfy 0 < low <= high, got ({low}, {high})")
        low, high = self.restitution_range
        if not 0.0 <= low <= high <= 1.0:
            raise RangeError(f"restitution_range must lie in [0, 1], got ({low}, {high})")
        if self.max_speed <= 0.0:
            raise RangeError(f"max_speed must be positive, got {self.max_speed}")
        if self.frames < 2:
            raise RangeError(f"frames must be at least 2, got {self.frames}")
        if self.fps < 1 or self.substeps < 1:
            raise RangeError(f"fps and substeps must be positive, got {self.fps}, {self.substeps}")
        if self.placement_retries < 1:
            raise RangeError(f"placement_retries must be positive, got {self.placement_retries}")
        weights = tuple(self.template_mix)
        if len(weights) != len(TEMPLATES) or any(not isinstance(w, Integral) or isinstance(w, bool) or w < 0 for w in weights) \
                or sum(weights) < 1:
            raise RangeError(
                f"template_mix needs {len(TEMPLATES)} non-negative integer weights with a positive sum, got {weights}")


@dataclass(frozen=True)
class PhysicsConfig:
    """
    Solver constants.

    Parameters
    ----------
    solver_iterations : int
        Sequential impulse sweeps over the sorted contact list per substep.
    resting_speed : float
        Relative normal speed (m/s) below which restitution is treated as 0.
    correction : float
        Fraction of penetration projected out per substep.
    speculative_margin : float
        Separation (m) within which approaching pairs are solved ahead of contact.
    contact_slop : float
        Gap (m) up to which a pair counts as touching and may bounce.
    blowup_limit : float
        Largest allowed |component| of position or velocity.
    divergence_eps : float
        Position threshold (m) above which a surviving body counts as affected.
    """
    solver_iterations: int = 8
    resting_speed: float = 0.05
    correction: float = 0.8
    speculative_margin: float = 0.1
    contact_slop: float = 1e-9
    blowup_limit: float = 1e6
    divergence_eps: float = 1e-6


@dataclass(frozen=True)
class MaskConfig:
    """
    Quadmask construction constants.

    Parameters
    ----------
    grid : int
        Cells per side of the coarse grid.
    grid_orig : bool
        Gridify the original-position affected mask as well.
    second_pass_factor : float
        Displacement, in multiples of body size, that triggers the second pass.
    free_fall_frames : int
        Consecutive frames of free-fall acceleration needed to trigger it.
    free_fall_tolerance : float
        Relative tolerance on the free-fall acceleration.
    """
    grid: int = 8
    grid_orig: bool = True
    second_pass_factor: float = 10.0
    free_fall_frames: int = 3
    free_fall_tolerance: float = 0.25


@dataclass(frozen=True)
class NoiseConfig:
    """
    Warped noise constants.

    Parameters
    ----------
    k : int
        Flow downsample factor (noise resolution = render resolution / k).
    channels : int
        Noise channels C.
    """
    k: int = 4
    channels: int = 4


def _env_jobs():
    value = os.environ.get("VOID_FORGE_JOBS", "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ForgeConfig:
    """
    Top level configuration of a generation run.

    Parameters
    ----------
    sampler : SamplerParams
    physics : PhysicsConfig
    masks : MaskConfig
    noise : NoiseConfig
    jobs : int
        Worker processes for generate.
    holdout : float
        Fraction of scenes assigned to the "test" split.
    flow_psnr_threshold : float
        Minimum inverse-warp PSNR (dB) accepted by validation.
    """
    sampler: SamplerParams = field(default_factory=SamplerParams)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    masks: MaskConfig = field(default_factory=MaskConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    jobs: int = 1
    holdout: float = 0.0
    flow_psnr_threshold: float = 35.0

    @staticmethod
    def from_env(**overrides):
        """ Build a config whose job count defaults to VOID_FORGE_JOBS """

        overrides.setdefault("jobs", _env_jobs())
        return ForgeConfig(**overrides)
