# Exceptions raised by the forge
# Validation problems are returned as data (see Violation), not raised.

from dataclasses import dataclass


class ForgeError(Exception):
    """ Base class for all forge errors """


class RangeError(ForgeError, ValueError):
    """ A parameter lies outside its allowed range """


class PlacementError(ForgeError):
    """ Non-overlapping placement failed within the retry budget """


class TooFewBodies(ForgeError, ValueError):
    """ Not enough dynamic bodies to pick removal targets from """


class NumericalBlowup(ForgeError):
    """
    A body position or velocity component exceeded the blowup limit.

    Parameters
    ----------
    message : str
        Description of the offending value.
    frame : int, optional
        Frame index at which the blowup was detected.
    """

    def __init__(self, message, frame=None):
        super().__init__(message if frame is None else f"{message} (frame {frame})")
        self.frame = frame


class ShapeMismatch(ForgeError, ValueError):
    """ Two inputs that must be aligned are not """


class UnknownId(ForgeError, KeyError):
    """ A body id is not part of the scene """

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class IndivisibleResolution(ForgeError, ValueError):
    """ A downsample factor does not divide the resolution """


class BadMagic(ForgeError, ValueError):
    """ A binary file does not start with the expected magic bytes """


class Truncated(ForgeError, ValueError):
    """
    A binary file ended early.

    Parameters
    ----------
    message : str
        Description of what was being read.
    offset : int
        Byte offset at which data ran out.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (truncated at byte {offset})")
        self.offset = offset


class ConsistencyError(ForgeError, ValueError):
    """ Inputs to an export disagree with each other """


class ForgeIOError(ForgeError, OSError):
    """
    A filesystem operation failed.

    Parameters
    ----------
    message : str
        Description of the failure.
    path : str
        The path involved.
    """

    def __init__(self, message, path):
        super().__init__(f"{message}: {path}")
        self.path = str(path)


class TransportError(ForgeError):
    """ The remote reasoner could not be reached """


class ProtocolError(ForgeError, ValueError):
    """
    The remote reasoner answered with a malformed response.

    Parameters
    ----------
    message : str
        Description of the problem.
    frame : int, optional
        Frame the bad entry belongs to.
    index : object, optional
        The offending value (for example a cell index).
    """

    def __init__(self, message, frame=None, index=None):
        details = []
        if frame is not None:
            details.append(f"frame {frame}")
        if index is not None:
            details.append(f"index {index}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.frame = frame
        self.index = index


class ReasonerTimeout(ForgeError, TimeoutError):
    """ The remote reasoner did not answer in time """


@dataclass(frozen=True)
class Violation:
    """
    One entry of a validation report.

    Parameters
    ----------
    where : str
        Field path (for specs) or record id (for datasets).
    check : str
        Name of the failed check, e.g. "PlacementOverlap".
    message : str
        Human readable detail.
    """
    where: str
    check: str
    message: str = ""

    def to_dict(self):
        return {"where": self.where, "check": self.check, "message": self.message}
