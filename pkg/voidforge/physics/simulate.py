# Factual and counterfactual simulation

import logging

import numpy as np

from voidforge.config import PhysicsConfig
from voidforge.errors import NumericalBlowup, ShapeMismatch, UnknownId
from voidforge.physics.integrator import step
from voidforge.physics.state import BodyState, ContactEvent, CounterfactualPair, Trajectory

logger = logging.getLogger(__name__)


def simulate(spec, removed_ids=None, config=None):
    """
    Run the scene for spec.frames frames.

    Parameters
    ----------
    spec : SceneSpec
        The scene.
    removed_ids : iterable of int, optional
        Bodies absent from the run. They stay at their initial state, marked
        not alive, and exchange no impulses.
    config : PhysicsConfig, optional
        Solver constants.

    Returns
    -------
    Trajectory
    """

    config = config or PhysicsConfig()
    removed = frozenset(int(i) for i in (removed_ids or ()))
    unknown = removed - set(spec.body_ids)
    if unknown:
        raise UnknownId(f"removed ids {sorted(unknown)} are not part of the scene")

    states = [BodyState(b.id, b.position0, b.velocity0, b.id not in removed) for b in spec.bodies]
    n = len(states)
    positions = np.zeros((spec.frames, n, 3), dtype=np.float64)
    velocities = np.zeros((spec.frames, n, 3), dtype=np.float64)
    positions[0] = [s.position for s in states]
    velocities[0] = [s.velocity for s in states]

    dt = spec.dt
    events = []
    for frame in range(1, spec.frames):
        impulses = {}
        try:
            for _ in range(spec.substeps):
                states = step(states, spec, dt, config, impulses)
        except NumericalBlowup as error:
            raise NumericalBlowup(error.args[0], frame=frame) from error
        positions[frame] = [s.position for s in states]
        velocities[frame] = [s.velocity for s in states]
        for (a, b), (impulse, normal) in sorted(impulses.items()):
            if impulse > 0.0:
                events.append(ContactEvent(frame, a, b, normal, impulse))

    logger.debug("Simulated scene %d without %s: %d contact events",
                 spec.scene_seed, sorted(removed), len(events))
    return Trajectory(
        scene_seed=spec.scene_seed,
        ids=spec.body_ids,
        positions=positions,
        velocities=velocities,
        alive=[s.alive for s in states],
        contact_events=tuple(events),
        dt=dt,
    )


def affected_bodies(factual, counterfactual, eps=1e-6):
    """
    Surviving bodies whose positions differ between two runs.

    Parameters
    ----------
    factual : Trajectory
        Run with every body.
    counterfactual : Trajectory
        Run with some bodies removed.
    eps : float
        Distance in meters above which a body counts as affected.

    Returns
    -------
    affected : set
        Ids of affected surviving bodies.
    first_frame : int or None
        Earliest frame at which any of them differs.
    """

    if factual.ids != counterfactual.ids or factual.positions.shape != counterfactual.positions.shape:
        raise ShapeMismatch(
            f"trajectories are not aligned: ids {factual.ids} vs {counterfactual.ids}, "
            f"shapes {factual.positions.shape} vs {counterfactual.positions.shape}")

    surviving = factual.alive & counterfactual.alive
    distance = np.linalg.norm(factual.positions - counterfactual.positions, axis=2)
    diverged = (distance > eps) & surviving[None, :]

    affected = {factual.ids[i] for i in np.flatnonzero(diverged.any(axis=0))}
    frames = np.flatnonzero(diverged.any(axis=1))
    first_frame = int(frames[0]) if len(frames) else None
    return affected, first_frame


def simulate_counterfactual(spec, config=None):
    """
    Simulate a scene with and without its removal targets.

    Parameters
    ----------
    spec : SceneSpec
        Scene with a valid removal_targets set.
    config : PhysicsConfig, optional
        Solver constants.

    Returns
    -------
    CounterfactualPair
    """

    config = config or PhysicsConfig()
    factual = simulate(spec, (), config)
    counterfactual = simulate(spec, spec.removal_targets, config)
    affected, first_frame = affected_bodies(factual, counterfactual, config.divergence_eps)
    logger.info("Scene %d: removing %s affects %s from frame %s",
                spec.scene_seed, sorted(spec.removal_targets), sorted(affected), first_frame)
    return CounterfactualPair(
        factual=factual,
        counterfactual=counterfactual,
        removed_ids=frozenset(spec.removal_targets),
        affected_ids=frozenset(affected),
        first_divergence_frame=first_frame,
    )


def kinetic_energy(trajectory, spec):
    """ Total kinetic energy of alive dynamic bodies per frame, in joules """

    masses = np.array([
        0.0 if (b.static or not alive) else b.mass
        for b, alive in zip(spec.bodies, trajectory.alive)
    ])
    speed2 = np.sum(trajectory.velocities ** 2, axis=2)
    return 0.5 * np.sum(speed2 * masses[None, :], axis=1)


def linear_momentum(trajectory, spec):
    """ Total linear momentum of alive dynamic bodies per frame, (T, 3) """

    masses = np.array([
        0.0 if (b.static or not alive) else b.mass
        for b, alive in zip(spec.bodies, trajectory.alive)
    ])
    return np.sum(trajectory.velocities * masses[None, :, None], axis=1)
