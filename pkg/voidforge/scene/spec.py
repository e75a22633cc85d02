# Scene specification types and their JSON form

import json
from dataclasses import dataclass, field, replace

from voidforge.errors import UnknownId
from voidforge.objects import Geometry

SCENE_SCHEMA = "void-forge/scene/1"

ORBIT = "orbit"
DOLLY = "dolly"

# Gap left between stacked bodies at t=0, bodies never start in contact
REST_GAP = 1e-5


def _floats(values):
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class BodySpec:
    """
    Initial conditions and material of one rigid body.

    Parameters
    ----------
    id : int
        Small integer unique per scene, 1..255 (0 is the ground).
    shape : Geometry
        Sphere or Box.
    mass : float or None
        Mass in kilograms, None for a static body.
    position0 : tuple
        Initial center in meters.
    velocity0 : tuple
        Initial velocity in m/s.
    restitution : float
        Restitution coefficient in [0, 1].
    albedo : tuple
        RGB albedo in [0, 1].
    """
    id: int
    shape: Geometry
    mass: float = 1.0
    position0: tuple = (0.0, 0.0, 0.0)
    velocity0: tuple = (0.0, 0.0, 0.0)
    restitution: float = 0.5
    albedo: tuple = (0.8, 0.8, 0.8)

    @property
    def static(self):
        return self.mass is None

    @property
    def inverse_mass(self):
        return 0.0 if self.mass is None else 1.0 / self.mass

    def to_dict(self):
        return {
            "id": int(self.id),
            "shape": self.shape.to_dict(),
            "mass": "static" if self.mass is None else float(self.mass),
            "position0": list(_floats(self.position0)),
            "velocity0": list(_floats(self.velocity0)),
            "restitution": float(self.restitution),
            "albedo": list(_floats(self.albedo)),
        }

    @staticmethod
    def from_dict(data):
        return BodySpec(
            id=int(data["id"]),
            shape=Geometry.from_dict(data["shape"]),
            mass=None if data["mass"] == "static" else float(data["mass"]),
            position0=_floats(data["position0"]),
            velocity0=_floats(data["velocity0"]),
            restitution=float(data["restitution"]),
            albedo=_floats(data["albedo"]),
        )


@dataclass(frozen=True)
class CameraTrajectorySpec:
    """
    Camera path over the clip, parameters ramp linearly from the "0" to the
    "1" endpoint.

    Parameters
    ----------
    mode : str
        ORBIT or DOLLY.
    center : tuple
        Point the camera looks at.
    radius0, radius1 : float
        Horizontal distance from the center (orbit) or scale of the initial
        offset (dolly).
    height0, height1 : float
        Eye height above the center.
    angle0, angle1 : float
        Azimuth in radians.
    focal0, focal1 : float
        Focal length in pixels.
    """
    mode: str = ORBIT
    center: tuple = (0.0, 0.2, 0.0)
    radius0: float = 3.4
    radius1: float = 3.4
    height0: float = 1.6
    height1: float = 1.6
    angle0: float = 0.0
    angle1: float = 0.0
    focal0: float = 140.0
    focal1: float = 140.0

    def to_dict(self):
        return {
            "mode": self.mode,
            "center": list(_floats(self.center)),
            "radius0": float(self.radius0),
            "radius1": float(self.radius1),
            "height0": float(self.height0),
            "height1": float(self.height1),
            "angle0": float(self.angle0),
            "angle1": float(self.angle1),
            "focal0": float(self.focal0),
            "focal1": float(self.focal1),
        }

    @staticmethod
    def from_dict(data):
        data = dict(data)
        data["center"] = _floats(data["center"])
        return CameraTrajectorySpec(**data)


@dataclass(frozen=True)
class SceneSpec:
    """
    Full seeded description of a scene. Every downstream artifact is a pure
    function of this value.

    Parameters
    ----------
    scene_seed : int
        64-bit seed the scene was sampled from.
    bodies : tuple
        BodySpec entries.
    camera : CameraTrajectorySpec
        Camera path.
    removal_targets : frozenset
        Ids of the bodies removed in the counterfactual.
    frames : int
        Frame count T.
    fps : int
        Frames per second.
    substeps : int
        Physics substeps per frame.
    resolution : tuple
        (width, height) in pixels.
    light_dir : tuple
        Unit vector pointing towards the light.
    ground_albedo : tuple
        RGB albedo of the ground plane y = 0.
    gravity : float
        Gravitational acceleration along -y in m/s^2.
    ground_restitution : float
        Restitution of the ground plane.
    template : str
        Name of the scenario template that produced the scene.
    """
    scene_seed: int = 0
    bodies: tuple = ()
    camera: CameraTrajectorySpec = field(default_factory=CameraTrajectorySpec)
    removal_targets: frozenset = frozenset()
    frames: int = 49
    fps: int = 24
    substeps: int = 10
    resolution: tuple = (128, 128)
    light_dir: tuple = (0.0, 1.0, 0.0)
    ground_albedo: tuple = (0.65, 0.65, 0.65)
    gravity: float = 9.81
    ground_restitution: float = 0.5
    template: str = "custom"

    @property
    def dt(self):
        """ Substep length in seconds """
        return 1.0 / (self.fps * self.substeps)

    @property
    def body_ids(self):
        return tuple(b.id for b in self.bodies)

    @property
    def dynamic_ids(self):
        return tuple(b.id for b in self.bodies if not b.static)

    def body(self, body_id):
        """ Look up a body by id """
        for b in self.bodies:
            if b.id == body_id:
                return b
        raise UnknownId(f"no body with id {body_id}")

    def with_targets(self, targets):
        return replace(self, removal_targets=frozenset(int(t) for t in targets))

    def to_dict(self):
        return {
            "schema": SCENE_SCHEMA,
            "scene_seed": int(self.scene_seed),
            "template": self.template,
            "frames": int(self.frames),
            "fps": int(self.fps),
            "substeps": int(self.substeps),
            "resolution": [int(self.resolution[0]), int(self.resolution[1])],
            "gravity": float(self.gravity),
            "ground_restitution": float(self.ground_restitution),
            "light_dir": list(_floats(self.light_dir)),
            "ground_albedo": list(_floats(self.ground_albedo)),
            "camera": self.camera.to_dict(),
            "removal_targets": sorted(int(t) for t in self.removal_targets),
            "bodies": [b.to_dict() for b in self.bodies],
        }

    def to_json(self):
        """ Serialize to a UTF-8 JSON document with stable field order """
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_dict(data):
        if data.get("schema") != SCENE_SCHEMA:
            raise ValueError(f"Unsupported scene schema {data.get('schema')!r}")
        return SceneSpec(
            scene_seed=int(data["scene_seed"]),
            bodies=tuple(BodySpec.from_dict(b) for b in data["bodies"]),
            camera=CameraTrajectorySpec.from_dict(data["camera"]),
            removal_targets=frozenset(int(t) for t in data["removal_targets"]),
            frames=int(data["frames"]),
            fps=int(data["fps"]),
            substeps=int(data["substeps"]),
            resolution=(int(data["resolution"][0]), int(data["resolution"][1])),
            light_dir=_floats(data["light_dir"]),
            ground_albedo=_floats(data["ground_albedo"]),
            gravity=float(data["gravity"]),
            ground_restitution=float(data["ground_restitution"]),
            template=data.get("template", "custom"),
        )

    @staticmethod
    def from_json(text):
        return SceneSpec.from_dict(json.loads(text))
