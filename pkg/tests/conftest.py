import pytest

from voidforge.config import SamplerParams
from voidforge.objects import Box, Sphere
from voidforge.scene import BodySpec, CameraTrajectorySpec, SceneSpec


@pytest.fixture
def small_params():
    """ Sampler settings small enough for end to end tests """
    return SamplerParams(frames=8, resolution=(32, 32))


@pytest.fixture
def make_spec():
    """ Factory for hand built scenes, keyword overrides go to SceneSpec """

    def _make(bodies, targets=None, **kwargs):
        kwargs.setdefault("frames", 6)
        kwargs.setdefault("resolution", (32, 32))
        kwargs.setdefault("camera", CameraTrajectorySpec(focal0=36.0, focal1=36.0))
        kwargs.setdefault("light_dir", (0.0, 1.0, 0.0))
        if targets is None:
            targets = [bodies[0].id]
        return SceneSpec(bodies=tuple(bodies), removal_targets=frozenset(targets), **kwargs)

    return _make


@pytest.fixture
def resting_pair_spec(make_spec):
    """ Two spheres resting far apart; removing one changes nothing else """
    return make_spec([
        BodySpec(1, Sphere(0.2), 1.0, (-0.6, 0.2, 0.0)),
        BodySpec(2, Sphere(0.2), 1.0, (0.6, 0.2, 0.0)),
    ], targets=[1])


@pytest.fixture
def stack_spec(make_spec):
    """ A box resting on a support box, the support is removed """
    return make_spec([
        BodySpec(1, Box((0.3, 0.2, 0.3)), 1.0, (0.0, 0.2, 0.0), restitution=0.5),
        BodySpec(2, Box((0.15, 0.15, 0.15)), 1.0, (0.0, 0.55 + 1e-5, 0.0), restitution=0.5),
    ], targets=[1], frames=12)
