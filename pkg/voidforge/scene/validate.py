# Scene specification checks
# Violations are returned as data; an empty list means the spec is valid.

import math

from voidforge.errors import Violation
from voidforge.objects import SPHERE, pair_contact

MIN_SEPARATION = 1e-6
MAX_BODY_ID = 255


def _finite(values):
    return all(math.isfinite(v) for v in values)


def _check_body(index, body, report):
    path = f"bodies[{index}]"
    if not 1 <= body.id <= MAX_BODY_ID:
        report.append(Violation(f"{path}.id", "RangeViolation", f"id {body.id} outside 1..{MAX_BODY_ID}"))
    if body.shape.kind == SPHERE:
        if not body.shape.radius > 0.0:
            report.append(Violation(f"{path}.shape.radius", "RangeViolation",
                                    f"radius must be positive, got {body.shape.radius}"))
    else:
        for axis, h in enumerate(body.shape.half_extents):
            if not h > 0.0:
                report.append(Violation(f"{path}.shape.half_extents[{axis}]", "RangeViolation",
                                        f"half extent must be positive, got {h}"))
    if body.mass is not None and not body.mass > 0.0:
        report.append(Violation(f"{path}.mass", "RangeViolation", f"mass must be positive, got {body.mass}"))
    if not 0.0 <= body.restitution <= 1.0:
        report.append(Violation(f"{path}.restitution", "RangeViolation",
                                f"restitution must lie in [0, 1], got {body.restitution}"))
    if not all(0.0 <= c <= 1.0 for c in body.albedo):
        report.append(Violation(f"{path}.albedo", "RangeViolation", f"albedo must lie in [0, 1], got {body.albedo}"))
    if not (_finite(body.position0) and _finite(body.velocity0)):
        report.append(Violation(f"{path}.position0", "NonFinite", "initial conditions must be finite"))
    elif body.shape.extents[1] - body.position0[1] > MIN_SEPARATION:
        report.append(Violation(f"{path}.position0", "GroundPenetration",
                                f"body {body.id} starts below the ground plane"))
    if body.static and any(v != 0.0 for v in body.velocity0):
        report.append(Violation(f"{path}.velocity0", "RangeViolation", "static bodies cannot move"))


def validate_spec(spec):
    """
    Check every SceneSpec and BodySpec constraint.

    Parameters
    ----------
    spec : SceneSpec
        The spec to check.

    Returns
    -------
    list of Violation
        One entry per violated constraint, named by field path.
    """

    report = []

    # Per body checks
    for index, body in enumerate(spec.bodies):
        _check_body(index, body, report)

    # Unique ids
    ids = [b.id for b in spec.bodies]
    if len(set(ids)) != len(ids):
        report.append(Violation("bodies", "DuplicateId", f"body ids are not unique: {ids}"))

    # Pairwise separation at t=0
    for i in range(len(spec.bodies)):
        for j in range(i + 1, len(spec.bodies)):
            a, b = spec.bodies[i], spec.bodies[j]
            if not (_finite(a.position0) and _finite(b.position0)):
                continue
            _, penetration = pair_contact(a.shape, a.position0, b.shape, b.position0)
            if -penetration < MIN_SEPARATION:
                report.append(Violation(f"bodies[{i}],bodies[{j}]", "PlacementOverlap",
                                        f"bodies {a.id} and {b.id} are separated by {-penetration:.3g} m"))

    # Removal targets
    dynamic = set(spec.dynamic_ids)
    if not spec.removal_targets:
        report.append(Violation("removal_targets", "TargetViolation", "removal_targets is empty"))
    for target in sorted(spec.removal_targets):
        if target not in dynamic:
            report.append(Violation("removal_targets", "TargetViolation",
                                    f"target {target} is not a dynamic body"))

    # Clip and physics parameters
    if spec.frames < 2:
        report.append(Violation("frames", "RangeViolation", f"frames must be at least 2, got {spec.frames}"))
    if spec.substeps < 1:
        report.append(Violation("substeps", "RangeViolation", f"substeps must be at least 1, got {spec.substeps}"))
    if spec.fps < 1:
        report.append(Violation("fps", "RangeViolation", f"fps must be positive, got {spec.fps}"))
    width, height = spec.resolution
    if width < 1 or height < 1:
        report.append(Violation("resolution", "RangeViolation", f"resolution must be positive, got {spec.resolution}"))
    norm = math.sqrt(sum(c * c for c in spec.light_dir))
    if abs(norm - 1.0) > 1e-9:
        report.append(Violation("light_dir", "RangeViolation", f"light_dir must have unit norm, got {norm!r}"))
    if not 0.0 <= spec.ground_restitution <= 1.0:
        report.append(Violation("ground_restitution", "RangeViolation",
                                f"ground_restitution must lie in [0, 1], got {spec.ground_restitution}"))

    # Camera
    camera = spec.camera
    if not (camera.radius0 > 0.0 and camera.radius1 > 0.0):
        report.append(Violation("camera.radius0", "RangeViolation", "camera radii must be positive"))
    if not (camera.focal0 > 0.0 and camera.focal1 > 0.0):
        report.append(Violation("camera.focal0", "RangeViolation", "camera focal lengths must be positive"))

    return report
