# Geometries

from voidforge.utils.math import clamp, length, scale, sign, sub

SPHERE = 0
BOX = 1


class Geometry:
    """
    Class that represents the shape of a rigid body.
    Shapes are axis aligned and rotationless, so a shape is fully described
    by its kind and three parameters that the render kernels consume.

    Parameters
    ----------
    kind : int
        SPHERE or BOX.
    params : tuple
        Kernel parameters, (radius, radius, radius) or the half extents.
    """

    def __init__(self, kind, params):
        self.kind = kind
        self.params = tuple(float(p) for p in params)

    @property
    def extents(self):
        """ Half extents of the axis aligned bounding box """
        return self.params

    @property
    def size(self):
        """ Characteristic size, used to scale motion thresholds """
        return max(self.params)

    def lower_bound(self, center):
        """
        Lower corner of the bounding box

        Parameters
        ----------
        center : tuple
            The center of the body.
        """
        return tuple(c - e for c, e in zip(center, self.extents))

    def upper_bound(self, center):
        """
        Upper corner of the bounding box

        Parameters
        ----------
        center : tuple
            The center of the body.
        """
        return tuple(c + e for c, e in zip(center, self.extents))

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def from_dict(data):
        """ Rebuild a shape from its serialized form """

        if data["kind"] == "sphere":
            return Sphere(data["radius"])
        elif data["kind"] == "box":
            return Box(tuple(data["half_extents"]))
        raise ValueError(f"Unknown shape kind {data['kind']!r}")

    def __eq__(self, other):
        return isinstance(other, Geometry) and self.kind == other.kind and self.params == other.params

    def __hash__(self):
        return hash((self.kind, self.params))


class Sphere(Geometry):
    """
    Class that represents a sphere

    Parameters
    ----------
    radius : float
        The radius of the sphere
    """

    def __init__(self, radius):
        self.radius = float(radius)
        super().__init__(SPHERE, (radius, radius, radius))

    def to_dict(self):
        return {"kind": "sphere", "radius": self.radius}

    def __repr__(self):
        return f"Sphere(radius={self.radius!r})"


class Box(Geometry):
    """
    Class that represents an axis aligned box

    Parameters
    ----------
    half_extents : tuple
        Half of the box size along x, y and z
    """

    def __init__(self, half_extents):
        self.half_extents = tuple(float(h) for h in half_extents)
        super().__init__(BOX, self.half_extents)

    def to_dict(self):
        return {"kind": "box", "half_extents": list(self.half_extents)}

    def __repr__(self):
        return f"Box(half_extents={self.half_extents!r})"


# Signed separation tests between shapes
# The normal always points from the first body towards the second one;
# penetration is positive for overlap and negative for a gap.

_UP = (0.0, 1.0, 0.0)
_AXES = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def _sphere_sphere(radius_a, center_a, radius_b, center_b):
    d = sub(center_b, center_a)
    dist = length(d)
    if dist > 0.0:
        return scale(d, 1.0 / dist), radius_a + radius_b - dist
    # Concentric spheres, any direction separates them
    return _UP, radius_a + radius_b


def _box_sphere(box, center_box, radius, center_sphere):
    # Closest point of the box to the sphere center
    lower = box.lower_bound(center_box)
    upper = box.upper_bound(center_box)
    closest = (
        clamp(center_sphere[0], lower[0], upper[0]),
        clamp(center_sphere[1], lower[1], upper[1]),
        clamp(center_sphere[2], lower[2], upper[2]),
    )
    d = sub(center_sphere, closest)
    dist = length(d)
    if dist > 0.0:
        return scale(d, 1.0 / dist), radius - dist

    # Sphere center inside the box, push out through the nearest face
    best_axis = 0
    best_depth = None
    for axis in range(3):
        offset = center_sphere[axis] - center_box[axis]
        depth = box.half_extents[axis] - abs(offset)
        if best_depth is None or depth < best_depth:
            best_axis = axis
            best_depth = depth
    normal = scale(_AXES[best_axis], sign(center_sphere[best_axis] - center_box[best_axis]))
    return normal, radius + best_depth


def _box_box(box_a, center_a, box_b, center_b):
    d = sub(center_b, center_a)
    overlaps = [box_a.half_extents[i] + box_b.half_extents[i] - abs(d[i]) for i in range(3)]
    gaps = [min(o, 0.0) for o in overlaps]
    if any(g < 0.0 for g in gaps):
        # Separated, report the euclidean gap between the boxes
        direction = (sign(d[0]) * -gaps[0], sign(d[1]) * -gaps[1], sign(d[2]) * -gaps[2])
        gap = length(direction)
        return scale(direction, 1.0 / gap), -gap

    # Overlapping or touching, minimal penetration axis
    axis = min(range(3), key=lambda i: overlaps[i])
    return scale(_AXES[axis], sign(d[axis])), overlaps[axis]


def pair_contact(shape_a, center_a, shape_b, center_b):
    """
    Contact normal and penetration between two bodies.

    Parameters
    ----------
    shape_a : Geometry
        Shape of the first body.
    center_a : tuple
        Center of the first body.
    shape_b : Geometry
        Shape of the second body.
    center_b : tuple
        Center of the second body.

    Returns
    -------
    normal : tuple
        Unit vector from the first body towards the second.
    penetration : float
        Overlap depth, negative when the bodies are apart.
    """

    if shape_a.kind == SPHERE and shape_b.kind == SPHERE:
        return _sphere_sphere(shape_a.radius, center_a, shape_b.radius, center_b)
    elif shape_a.kind == BOX and shape_b.kind == SPHERE:
        return _box_sphere(shape_a, center_a, shape_b.radius, center_b)
    elif shape_a.kind == SPHERE and shape_b.kind == BOX:
        normal, penetration = _box_sphere(shape_b, center_b, shape_a.radius, center_a)
        return scale(normal, -1.0), penetration
    return _box_box(shape_a, center_a, shape_b, center_b)


def ground_contact(shape, center):
    """
    Contact between a body and the ground plane y = 0.

    Parameters
    ----------
    shape : Geometry
        Shape of the body.
    center : tuple
        Center of the body.

    Returns
    -------
    normal : tuple
        The world up vector.
    penetration : float
        Depth of the lowest point below the ground, negative above it.
    """

    return _UP, shape.extents[1] - center[1]
