# Narrow phase contact detection

from voidforge.objects import ground_contact, pair_contact
from voidforge.physics.state import Contact

GROUND_ID = 0


def _bounds_gap(shape_a, center_a, shape_b, center_b):
    """ Largest per axis gap between bounding boxes, a cheap lower bound on separation """
    return max(
        abs(center_b[i] - center_a[i]) - shape_a.extents[i] - shape_b.extents[i]
        for i in range(3)
    )


def detect_contacts(states, spec, margin=0.0):
    """
    Find contacts between alive bodies and with the ground.

    Parameters
    ----------
    states : list of BodyState
        Current states.
    spec : SceneSpec
        Scene the states belong to.
    margin : float
        Pairs separated by at most this distance are reported as well,
        with a negative penetration.

    Returns
    -------
    list of Contact
        Sorted by (id_a, id_b) with id_a < id_b; ground contacts use id_a = 0.
    """

    bodies = {b.id: b for b in spec.bodies}
    alive = sorted((s for s in states if s.alive), key=lambda s: s.id)
    contacts = []

    # Ground
    for state in alive:
        body = bodies[state.id]
        if body.static:
            continue
        normal, penetration = ground_contact(body.shape, state.position)
        if penetration >= -margin:
            contacts.append(Contact(GROUND_ID, state.id, normal, penetration))

    # Body pairs
    for i, state_a in enumerate(alive):
        body_a = bodies[state_a.id]
        for state_b in alive[i + 1:]:
            body_b = bodies[state_b.id]
            if body_a.static and body_b.static:
                continue
            if _bounds_gap(body_a.shape, state_a.position, body_b.shape, state_b.position) > margin:
                continue
            normal, penetration = pair_contact(body_a.shape, state_a.position, body_b.shape, state_b.position)
            if penetration >= -margin:
                contacts.append(Contact(state_a.id, state_b.id, normal, penetration))

    contacts.sort(key=lambda c: (c.id_a, c.id_b))
    return contacts
