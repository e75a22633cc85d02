from voidforge.objects.geometry import Geometry, Sphere, Box, SPHERE, BOX, pair_contact, ground_contact
