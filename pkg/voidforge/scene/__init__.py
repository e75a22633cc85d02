from voidforge.scene.spec import (
    SCENE_SCHEMA, ORBIT, DOLLY, REST_GAP, BodySpec, CameraTrajectorySpec, SceneSpec,
)
from voidforge.scene.seeding import mix_seed, splitmix64, stream_rng
from voidforge.scene.validate import validate_spec
from voidforge.scene.sampler import sample_scene, select_removal_targets, template_for_index
