from voidforge.physics.state import BodyState, Contact, ContactEvent, CounterfactualPair, Trajectory
from voidforge.physics.contacts import GROUND_ID, detect_contacts
from voidforge.physics.integrator import step
from voidforge.physics.simulate import (
    affected_bodies, kinetic_energy, linear_momentum, simulate, simulate_counterfactual,
)
