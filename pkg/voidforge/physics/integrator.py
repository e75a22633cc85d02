# Fixed timestep integrator
#
# One substep:
#   1. v += g dt for alive dynamic bodies
#   2. sequential normal impulses over contacts found at the start positions,
#      speculative contacts bound the drift so a gap closes without a bounce
#   3. x += v_drift dt
#   4. project out a fraction of the remaining penetration, split by inverse mass

import math

from voidforge.config import PhysicsConfig
from voidforge.errors import NumericalBlowup, RangeError
from voidforge.physics.contacts import GROUND_ID, detect_contacts
from voidforge.physics.state import BodyState
from voidforge.utils.math import add, dot, scale, sub

_ZERO = (0.0, 0.0, 0.0)


def _check_finite(state, limit):
    for value in state.position + state.velocity:
        if not math.isfinite(value) or abs(value) > limit:
            raise NumericalBlowup(f"body {state.id} state {state.position}, {state.velocity} exceeds {limit:g}")


def solve_impulses(contacts, velocities, inverse, restitution, dt, config, impulses=None):
    """
    Sequential impulse sweeps over a sorted contact list.

    Touching contacts (gap at most ``config.contact_slop``) get a restitution
    impulse. A speculative contact never bounces: a fast approach keeps its
    velocity until the bodies touch, a slow one is stopped at the gap. The
    returned drift velocities close every speculative gap exactly at the end
    of the substep.

    Parameters
    ----------
    contacts : list of Contact
        Contacts in deterministic order.
    velocities : dict
        Body id to velocity, updated in place.
    inverse : dict
        Body id to inverse mass (0 for static bodies and the ground).
    restitution : dict
        Body id to restitution.
    dt : float
        Substep length.
    config : PhysicsConfig
        Solver constants.
    impulses : dict, optional
        Accumulates (impulse sum, normal) per (id_a, id_b).

    Returns
    -------
    dict
        Body id to the velocity used for the drift.
    """

    for _ in range(config.solver_iterations):
        for contact in contacts:
            a, b = contact.id_a, contact.id_b
            inverse_sum = inverse[a] + inverse[b]
            if inverse_sum == 0.0:
                continue
            vn = dot(sub(velocities[b], velocities[a]), contact.normal)
            if vn >= 0.0:
                continue

            gap = -contact.penetration
            if gap > config.contact_slop:
                if -vn >= config.resting_speed:
                    continue
                j = -(vn + gap / dt) / inverse_sum
                if j <= 0.0:
                    continue
            else:
                # Combined restitution, zero for resting contacts
                e = restitution[a] * restitution[b]
                if -vn < config.resting_speed:
                    e = 0.0
                j = -(1.0 + e) * vn / inverse_sum
            velocities[a] = sub(velocities[a], scale(contact.normal, j * inverse[a]))
            velocities[b] = add(velocities[b], scale(contact.normal, j * inverse[b]))
            if impulses is not None:
                total, _ = impulses.get((a, b), (0.0, None))
                impulses[(a, b)] = (total + j, contact.normal)

    # Drift velocities stop at the gap
    drift = dict(velocities)
    for _ in range(config.solver_iterations):
        for contact in contacts:
            a, b = contact.id_a, contact.id_b
            inverse_sum = inverse[a] + inverse[b]
            if inverse_sum == 0.0:
                continue
            vn = dot(sub(drift[b], drift[a]), contact.normal)
            j = -(vn + max(0.0, -contact.penetration) / dt) / inverse_sum
            if j <= 0.0:
                continue
            drift[a] = sub(drift[a], scale(contact.normal, j * inverse[a]))
            drift[b] = add(drift[b], scale(contact.normal, j * inverse[b]))
    return drift


def step(states, spec, dt, config=None, impulses=None):
    """
    Advance body states by one substep.

    Parameters
    ----------
    states : list of BodyState
        States at the start of the substep.
    spec : SceneSpec
        Scene providing shapes, masses, restitution and gravity.
    dt : float
        Substep length in seconds.
    config : PhysicsConfig, optional
        Solver constants.
    impulses : dict, optional
        Accumulates applied impulses per contact pair.

    Returns
    -------
    list of BodyState
        States at the end of the substep, in the input order.
    """

    if not dt > 0.0:
        raise RangeError(f"dt must be positive, got {dt}")
    config = config or PhysicsConfig()
    bodies = {b.id: b for b in spec.bodies}

    inverse = {GROUND_ID: 0.0}
    restitution = {GROUND_ID: spec.ground_restitution}
    velocities = {GROUND_ID: _ZERO}
    for state in states:
        body = bodies[state.id]
        moving = state.alive and not body.static
        inverse[state.id] = body.inverse_mass if moving else 0.0
        restitution[state.id] = body.restitution
        velocity = state.velocity
        if moving:
            velocity = (velocity[0], velocity[1] - spec.gravity * dt, velocity[2])
        velocities[state.id] = velocity

    # Impulses at start of step positions
    contacts = detect_contacts(states, spec, margin=config.speculative_margin)
    drift = solve_impulses(contacts, velocities, inverse, restitution, dt, config, impulses)

    # Drift
    moved = []
    for state in states:
        position = state.position
        if inverse[state.id] > 0.0:
            position = add(position, scale(drift[state.id], dt))
        moved.append(BodyState(state.id, position, velocities[state.id], state.alive))

    # Position projection
    positions = {s.id: s.position for s in moved}
    for contact in detect_contacts(moved, spec):
        a, b = contact.id_a, contact.id_b
        inverse_sum = inverse[a] + inverse[b]
        if contact.penetration <= 0.0 or inverse_sum == 0.0:
            continue
        push = config.correction * contact.penetration / inverse_sum
        if a != GROUND_ID:
            positions[a] = sub(positions[a], scale(contact.normal, push * inverse[a]))
        positions[b] = add(positions[b], scale(contact.normal, push * inverse[b]))

    result = [BodyState(s.id, positions[s.id], s.velocity, s.alive) for s in moved]
    for state in result:
        _check_finite(state, config.blowup_limit)
    return result
