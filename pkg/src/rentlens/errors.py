"""Exception hierarchy.

Everything raised on purpose by the package derives from ``RentLensError``.
Parse failures derive from ``ParseError`` so the CLI can map them to exit
code 2; everything else maps to exit code 3.
"""


class RentLensError(Exception):
    pass


# -- input parsing -----------------------------------------------------------

class ParseError(RentLensError):
    pass


class BlifSyntaxError(ParseError):
    def __init__(self, message, line, column=1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class MultipleDrivers(ParseError):
    def __init__(self, net, line=None):
        self.net = net
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"net {net!r} has more than one driver{where}")


class UndrivenNet(UserWarning):
    """Warning: a net is read by some block but nothing drives it."""


class XmlError(ParseError):
    pass


class UnknownPrimitive(ParseError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"packed netlist names primitive {name!r} which is not in the pre-packing netlist")


class EmptyCluster(ParseError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"cluster {name!r} contains no primitives")


class ArchFileError(ParseError):
    pass


# -- netlist model -----------------------------------------------------------

class EmptyNetlist(RentLensError):
    pass


class UnknownBlock(RentLensError):
    def __init__(self, block_id):
        self.block_id = block_id
        super().__init__(f"block {block_id!r} is not in the netlist")


# -- partitioning --------------------------------------------------------------

class TooSmall(RentLensError):
    pass


class InfeasibleBalance(RentLensError):
    pass


# -- analysis ----------------------------------------------------------------

class EmptyTree(RentLensError):
    pass


class InsufficientPoints(RentLensError):
    pass


class DegenerateAbscissa(RentLensError):
    pass


class DomainError(RentLensError, ValueError):
    pass


class NoSuchKind(RentLensError):
    pass


class InfeasibleSpec(RentLensError):
    pass


class IncomparableInputs(RentLensError):
    pass
