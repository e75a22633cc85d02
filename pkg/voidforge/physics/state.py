# Simulation state and trajectory containers

from dataclasses import dataclass

import numpy as np

from voidforge.errors import ShapeMismatch, UnknownId


@dataclass(frozen=True)
class BodyState:
    """
    Kinematic state of one body at one instant.

    Parameters
    ----------
    id : int
        Body id.
    position : tuple
        Center in meters.
    velocity : tuple
        Velocity in m/s.
    alive : bool
        False for bodies removed in a counterfactual run.
    """
    id: int
    position: tuple
    velocity: tuple
    alive: bool = True


@dataclass(frozen=True)
class Contact:
    """
    A contact between two bodies, or a body and the ground (id_a = 0).
    The normal points from id_a towards id_b, penetration is negative for
    speculative contacts that are still apart.
    """
    id_a: int
    id_b: int
    normal: tuple
    penetration: float


@dataclass(frozen=True)
class ContactEvent:
    """ Impulses exchanged by a pair during one frame """
    frame: int
    id_a: int
    id_b: int
    normal: tuple
    impulse: float

    def to_dict(self):
        return {
            "frame": int(self.frame),
            "id_a": int(self.id_a),
            "id_b": int(self.id_b),
            "normal": [float(n) for n in self.normal],
            "impulse": float(self.impulse),
        }

    @staticmethod
    def from_dict(data):
        return ContactEvent(
            frame=int(data["frame"]),
            id_a=int(data["id_a"]),
            id_b=int(data["id_b"]),
            normal=tuple(float(n) for n in data["normal"]),
            impulse=float(data["impulse"]),
        )


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


class Trajectory:
    """
    Body states sampled at frame times.

    Parameters
    ----------
    scene_seed : int
        Seed of the scene that was simulated.
    ids : tuple
        Body ids, one per column.
    positions : ndarray
        (T, N, 3) centers in meters.
    velocities : ndarray
        (T, N, 3) velocities in m/s.
    alive : ndarray
        (N,) False for removed bodies.
    contact_events : tuple
        ContactEvent entries sorted by (frame, id_a, id_b).
    dt : float
        Substep length the trajectory was integrated with.
    """

    def __init__(self, scene_seed, ids, positions, velocities, alive, contact_events=(), dt=0.0):
        self.scene_seed = int(scene_seed)
        self.ids = tuple(int(i) for i in ids)
        self.positions = _frozen(positions, np.float64)
        self.velocities = _frozen(velocities, np.float64)
        self.alive = _frozen(alive, bool)
        self.contact_events = tuple(contact_events)
        self.dt = float(dt)

        n = len(self.ids)
        if self.positions.ndim != 3 or self.positions.shape[1:] != (n, 3):
            raise ShapeMismatch(f"positions must have shape (T, {n}, 3), got {self.positions.shape}")
        if self.velocities.shape != self.positions.shape:
            raise ShapeMismatch(f"velocities shape {self.velocities.shape} != positions shape {self.positions.shape}")
        if self.alive.shape != (n,):
            raise ShapeMismatch(f"alive must have shape ({n},), got {self.alive.shape}")

    @property
    def frames(self):
        return self.positions.shape[0]

    def index(self, body_id):
        """ Column of a body id """
        try:
            return self.ids.index(body_id)
        except ValueError:
            raise UnknownId(f"no body with id {body_id} in trajectory")

    def is_alive(self, body_id):
        return bool(self.alive[self.index(body_id)])

    def position(self, frame, body_id):
        return tuple(float(c) for c in self.positions[frame, self.index(body_id)])

    def states(self, frame):
        """
        Body states at a frame.

        Parameters
        ----------
        frame : int
            Frame index.

        Returns
        -------
        list of BodyState
        """

        return [
            BodyState(
                body_id,
                tuple(float(c) for c in self.positions[frame, i]),
                tuple(float(c) for c in self.velocities[frame, i]),
                bool(self.alive[i]),
            )
            for i, body_id in enumerate(self.ids)
        ]

    def to_dict(self):
        return {
            "scene_seed": self.scene_seed,
            "dt": self.dt,
            "ids": list(self.ids),
            "alive": [bool(a) for a in self.alive],
            "positions": self.positions.tolist(),
            "velocities": self.velocities.tolist(),
            "contact_events": [e.to_dict() for e in self.contact_events],
        }

    @staticmethod
    def from_dict(data):
        n = len(data["ids"])
        return Trajectory(
            scene_seed=data["scene_seed"],
            ids=data["ids"],
            positions=np.array(data["positions"], dtype=np.float64).reshape(-1, n, 3),
            velocities=np.array(data["velocities"], dtype=np.float64).reshape(-1, n, 3),
            alive=data["alive"],
            contact_events=tuple(ContactEvent.from_dict(e) for e in data["contact_events"]),
            dt=data["dt"],
        )

    def __eq__(self, other):
        return (
            isinstance(other, Trajectory)
            and self.scene_seed == other.scene_seed
            and self.ids == other.ids
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.velocities, other.velocities)
            and np.array_equal(self.alive, other.alive)
            and self.contact_events == other.contact_events
        )

    __hash__ = None


@dataclass(frozen=True)
class CounterfactualPair:
    """
    Factual and counterfactual runs of one scene.

    Parameters
    ----------
    factual : Trajectory
        Run with every body.
    counterfactual : Trajectory
        Run without removed_ids.
    removed_ids : frozenset
        The removed set O.
    affected_ids : frozenset
        Surviving bodies whose motion differs between the runs.
    first_divergence_frame : int or None
        First frame at which any surviving body differs.
    """
    factual: Trajectory
    counterfactual: Trajectory
    removed_ids: frozenset
    affected_ids: frozenset
    first_divergence_frame: object = None
