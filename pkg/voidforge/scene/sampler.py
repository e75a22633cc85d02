# Procedural scene sampler
#
# Scenes come from three templates, one per interaction class: a collision
# chain, a support stack and an obstruction. Dynamics are rotationless, so
# each template only uses translation-expressible interactions (a domino
# line becomes a chain of sliding blocks and balls).

import logging
import math

import numpy as np

from voidforge.config import TEMPLATES, SamplerParams
from voidforge.errors import PlacementError, RangeError, TooFewBodies, UnknownId
from voidforge.objects import BOX, Box, Sphere, pair_contact
from voidforge.scene.seeding import STREAM_BODIES, STREAM_CAMERA, STREAM_LIGHT, STREAM_TARGETS, mix_seed, stream_rng
from voidforge.scene.spec import DOLLY, ORBIT, REST_GAP, BodySpec, CameraTrajectorySpec, SceneSpec
from voidforge.scene.validate import validate_spec

logger = logging.getLogger(__name__)

# Horizontal launch directions, axis aligned so boxes meet face on
_DIRECTIONS = ((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.0, 0.0, -1.0))

# Distractors are dropped in the square [-_ARENA, _ARENA]^2
_ARENA = 1.2
_CLEARANCE = 0.05
_CAMERA_CENTER = (0.0, 0.2, 0.0)


def template_for_index(scene_index, template_mix=(1, 1, 1)):
    """
    Template used for a scene index, a weighted round robin over TEMPLATES.

    Parameters
    ----------
    scene_index : int
        Index of the scene.
    template_mix : tuple
        Integer weight per template.

    Returns
    -------
    str
        Template name.
    """

    cycle = []
    for name, weight in zip(TEMPLATES, template_mix):
        cycle.extend([name] * weight)
    if not cycle:
        raise RangeError(f"template_mix has no positive weight: {tuple(template_mix)}")
    return cycle[scene_index % len(cycle)]


def _clip_range(low, high, min_size=None, max_size=None):
    if max_size is not None:
        high = min(high, max_size)
    if min_size is not None:
        low = max(low, min_size)
    return min(low, high), high


class _Placer:
    """ Accumulates bodies while a template is being built """

    def __init__(self, params, rng):
        self.params = params
        self.rng = rng
        self.bodies = []

    def uniform(self, low, high):
        return float(self.rng.uniform(low, high))

    def random_shape(self, min_size=None, max_size=None):
        if self.rng.random() < 0.5:
            low, high = _clip_range(*self.params.radius_range, min_size, max_size)
            return Sphere(self.uniform(low, high))
        low, high = _clip_range(*self.params.half_extent_range, min_size, max_size)
        return Box(tuple(self.uniform(low, high) for _ in range(3)))

    def add(self, shape, position, velocity=(0.0, 0.0, 0.0), mass=None, static=False):
        if static:
            mass = None
        elif mass is None:
            mass = self.uniform(*self.params.mass_range)
        body = BodySpec(
            id=len(self.bodies) + 1,
            shape=shape,
            mass=mass,
            position0=tuple(float(p) for p in position),
            velocity0=tuple(float(v) for v in velocity),
            restitution=self.uniform(*self.params.restitution_range),
            albedo=tuple(self.uniform(0.2, 0.95) for _ in range(3)),
        )
        self.bodies.append(body)
        return body.id

    def fits(self, shape, position, clearance):
        for body in self.bodies:
            _, penetration = pair_contact(body.shape, body.position0, shape, position)
            if -penetration < clearance:
                return False
        return True

    def place_distractor(self):
        retries = self.params.placement_retries
        for attempt in range(retries):
            shape = self.random_shape()
            position = (self.uniform(-_ARENA, _ARENA), shape.extents[1], self.uniform(-_ARENA, _ARENA))
            if self.fits(shape, position, _CLEARANCE):
                velocity = (0.0, 0.0, 0.0)
                if self.rng.random() < 0.5:
                    speed = self.uniform(0.0, 0.25 * self.params.max_speed)
                    heading = self.uniform(0.0, 2.0 * math.pi)
                    velocity = (speed * math.cos(heading), 0.0, speed * math.sin(heading))
                if attempt >= retries * 3 // 4:
                    logger.warning("Placed body %d after %d of %d retries",
                                   len(self.bodies) + 1, attempt + 1, retries)
                return self.add(shape, position, velocity)
        raise PlacementError(
            f"could not place body {len(self.bodies) + 1} without overlap after {retries} retries")


def _along(direction, distance, lateral, height):
    """ World position at a signed distance along a launch direction """

    axis = 0 if direction[0] != 0.0 else 2
    position = [0.0, height, 0.0]
    position[axis] = direction[axis] * distance
    position[2 - axis] = lateral
    return tuple(position)


def _axes(direction):
    axis = 0 if direction[0] != 0.0 else 2
    return axis, 2 - axis


def _build_collision_chain(placer, n_bodies):
    """ A striker slides into a line of resting bodies; the first struck body is the target """

    direction = _DIRECTIONS[int(placer.rng.integers(len(_DIRECTIONS)))]
    axis, _ = _axes(direction)
    chain_length = min(n_bodies, int(placer.rng.integers(3, 5)))
    shapes = [placer.random_shape(max_size=0.2) for _ in range(chain_length)]
    gaps = [placer.uniform(0.05, 0.2) for _ in range(chain_length - 1)] + [0.0]
    total = sum(2.0 * s.extents[axis] for s in shapes) + sum(gaps)
    lateral = placer.uniform(-0.3, 0.3)

    # Lay the chain out along the launch direction, striker first
    ids = []
    cursor = -0.5 * total
    for k, shape in enumerate(shapes):
        position = _along(direction, cursor + shape.extents[axis], lateral, shape.extents[1])
        velocity = (0.0, 0.0, 0.0)
        if k == 0:
            speed = placer.uniform(0.5 * placer.params.max_speed, placer.params.max_speed)
            velocity = tuple(speed * d for d in direction)
        ids.append(placer.add(shape, position, velocity))
        cursor += 2.0 * shape.extents[axis] + gaps[k]
    return [ids[1]]


def _build_support_removal(placer, n_bodies):
    """ A body rests on a support box; the support is the target """

    low, high = placer.params.half_extent_range
    wide = _clip_range(low, high, min_size=0.15)
    tall = _clip_range(low, high, min_size=0.1)
    support_shape = Box((placer.uniform(*wide), placer.uniform(*tall), placer.uniform(*wide)))
    hx, hy, hz = support_shape.half_extents
    cx, cz = placer.uniform(-0.4, 0.4), placer.uniform(-0.4, 0.4)
    support = placer.add(support_shape, (cx, hy, cz))

    # Body resting on top of the support
    top_shape = placer.random_shape(max_size=0.2)
    top_position = (
        cx + placer.uniform(-0.7, 0.7) * hx,
        2.0 * hy + top_shape.extents[1] + REST_GAP,
        cz + placer.uniform(-0.7, 0.7) * hz,
    )
    placer.add(top_shape, top_position)

    # Optional third level on a box
    if n_bodies >= 4 and top_shape.kind == BOX and placer.rng.random() < 0.5:
        cap_shape = placer.random_shape(max_size=0.15)
        cap_position = (
            top_position[0] + placer.uniform(-0.7, 0.7) * top_shape.half_extents[0],
            top_position[1] + top_shape.extents[1] + cap_shape.extents[1] + REST_GAP,
            top_position[2] + placer.uniform(-0.7, 0.7) * top_shape.half_extents[2],
        )
        placer.add(cap_shape, cap_position)
    return [support]


def _build_obstruction_removal(placer, n_bodies):
    """ A heavy obstacle shields a body from a projectile; the obstacle is the target """

    params = placer.params
    direction = _DIRECTIONS[int(placer.rng.integers(len(_DIRECTIONS)))]
    axis, lateral_axis = _axes(direction)

    # Heavy obstacle at the origin
    low, high = params.half_extent_range
    obstacle_shape = Box(tuple(placer.uniform(*_clip_range(low, high, min_size=0.1)) for _ in range(3)))
    lateral = placer.uniform(-0.2, 0.2)
    mass = 4.0 * placer.uniform(*params.mass_range)
    obstacle = placer.add(obstacle_shape, _along(direction, 0.0, lateral, obstacle_shape.extents[1]), mass=mass)
    reach = obstacle_shape.extents[axis]
    spread = 0.5 * obstacle_shape.extents[lateral_axis]

    # Projectile launched at the obstacle
    projectile_shape = placer.random_shape(max_size=min(0.15, obstacle_shape.extents[1]))
    distance = -(reach + placer.uniform(0.3, 0.6) + projectile_shape.extents[axis])
    speed = placer.uniform(0.5 * params.max_speed, params.max_speed)
    placer.add(
        projectile_shape,
        _along(direction, distance, lateral + placer.uniform(-spread, spread), projectile_shape.extents[1]),
        tuple(speed * d for d in direction),
    )

    # Shielded body behind the obstacle
    shielded_shape = placer.random_shape(max_size=0.2)
    distance = reach + placer.uniform(0.05, 0.2) + shielded_shape.extents[axis]
    placer.add(
        shielded_shape,
        _along(direction, distance, lateral + placer.uniform(-spread, spread), shielded_shape.extents[1]),
    )

    # Optional static backstop
    if n_bodies >= 4 and placer.rng.random() < 0.5:
        half_extents = [0.05, 0.25, 0.05]
        half_extents[lateral_axis] = 0.5
        wall_shape = Box(tuple(half_extents))
        distance += shielded_shape.extents[axis] + placer.uniform(0.3, 0.5) + 0.05
        position = _along(direction, distance, lateral, 0.25)
        if placer.fits(wall_shape, position, _CLEARANCE):
            placer.add(wall_shape, position, static=True)
    return [obstacle]


_TEMPLATE_BUILDERS = {
    "collision_chain": _build_collision_chain,
    "support_removal": _build_support_removal,
    "obstruction_removal": _build_obstruction_removal,
}


def _sample_camera(scene_seed, params):
    rng = stream_rng(scene_seed, STREAM_CAMERA)
    width = params.resolution[0]
    mode = ORBIT if rng.random() < 0.5 else DOLLY
    radius0 = float(rng.uniform(3.0, 3.8))
    height0 = float(rng.uniform(1.2, 2.0))
    angle0 = float(rng.uniform(0.0, 2.0 * math.pi))
    focal0 = 1.1 * width * float(rng.uniform(0.95, 1.1))
    focal1 = focal0 * float(rng.uniform(0.85, 1.2))
    if mode == ORBIT:
        radius1 = radius0 * float(rng.uniform(0.9, 1.1))
        height1 = height0 + float(rng.uniform(-0.3, 0.3))
        angle1 = angle0 + float(rng.uniform(-0.6, 0.6))
    else:
        # A dolly moves along the initial view axis, height and angle follow from the radius
        radius1 = radius0 * float(rng.uniform(0.8, 1.05))
        height1 = height0
        angle1 = angle0
    return CameraTrajectorySpec(
        mode=mode, center=_CAMERA_CENTER,
        radius0=radius0, radius1=radius1,
        height0=height0, height1=height1,
        angle0=angle0, angle1=angle1,
        focal0=focal0, focal1=focal1,
    )


def _sample_light(scene_seed):
    rng = stream_rng(scene_seed, STREAM_LIGHT)
    elevation = float(rng.uniform(math.radians(40.0), math.radians(65.0)))
    azimuth = float(rng.uniform(0.0, 2.0 * math.pi))
    light = (math.cos(elevation) * math.cos(azimuth), math.sin(elevation), math.cos(elevation) * math.sin(azimuth))
    norm = math.sqrt(sum(c * c for c in light))
    ground_albedo = tuple(float(rng.uniform(0.55, 0.75)) for _ in range(3))
    return tuple(c / norm for c in light), ground_albedo


def select_removal_targets(spec, seed, required=()):
    """
    Choose the removal target set O.

    Parameters
    ----------
    spec : SceneSpec
        Scene whose dynamic bodies are candidates (its own targets are ignored).
    seed : int
        Seed of the choice.
    required : iterable of int, optional
        Ids that must be part of the set.

    Returns
    -------
    frozenset
        Between 1 and ceil(#dynamic / 2) dynamic body ids.
    """

    dynamic = sorted(spec.dynamic_ids)
    if len(dynamic) < 2:
        raise TooFewBodies(f"need at least 2 dynamic bodies to choose targets, got {len(dynamic)}")
    upper = (len(dynamic) + 1) // 2
    required = sorted(set(int(r) for r in required))
    for body_id in required:
        if body_id not in dynamic:
            raise UnknownId(f"required target {body_id} is not a dynamic body")
    if len(required) > upper:
        raise RangeError(f"{len(required)} required targets exceed the bound {upper}")

    # Smaller target sets are more likely, each extra target halves the odds
    rng = stream_rng(seed, STREAM_TARGETS)
    low = max(1, len(required))
    counts = np.arange(low, upper + 1)
    weights = 0.5 ** (counts - low)
    count = int(rng.choice(counts, p=weights / weights.sum()))

    pool = [body_id for body_id in dynamic if body_id not in required]
    order = rng.permutation(len(pool))
    extra = sorted(pool[i] for i in order[:count - len(required)])
    return frozenset(required + extra)


def sample_scene(master_seed, scene_index, params=None):
    """
    Sample a scene specification.

    Parameters
    ----------
    master_seed : int
        Seed of the dataset.
    scene_index : int
        Index of the scene.
    params : SamplerParams, optional
        Sampling ranges, defaults to SamplerParams().

    Returns
    -------
    SceneSpec
        A valid spec, a pure function of the inputs.
    """

    params = params or SamplerParams()
    params.check()
    scene_seed = mix_seed(master_seed, scene_index)
    template = template_for_index(scene_index, params.template_mix)

    # Template bodies first, then distractors up to the body count
    rng = stream_rng(scene_seed, STREAM_BODIES)
    n_bodies = int(rng.integers(params.min_bodies, params.max_bodies + 1))
    placer = _Placer(params, rng)
    required = _TEMPLATE_BUILDERS[template](placer, n_bodies)
    while len(placer.bodies) < n_bodies:
        placer.place_distractor()

    light_dir, ground_albedo = _sample_light(scene_seed)
    spec = SceneSpec(
        scene_seed=scene_seed,
        bodies=tuple(placer.bodies),
        camera=_sample_camera(scene_seed, params),
        frames=params.frames,
        fps=params.fps,
        substeps=params.substeps,
        resolution=(int(params.resolution[0]), int(params.resolution[1])),
        light_dir=light_dir,
        ground_albedo=ground_albedo,
        template=template,
    )
    spec = spec.with_targets(select_removal_targets(spec, scene_seed, required=required))

    report = validate_spec(spec)
    if report:
        raise PlacementError(f"sampled scene {scene_index} is invalid: {report[0].where} {report[0].check}")
    logger.debug("Sampled scene %d (%s) with %d bodies, targets %s",
                 scene_index, template, len(spec.bodies), sorted(spec.removal_targets))
    return spec
