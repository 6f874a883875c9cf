"""Exception hierarchy shared by every pfle module."""


class PFLeError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(PFLeError, ValueError):
    """The instance violates a structural or metric assumption."""


class MetricViolation(InstanceError):
    def __init__(self, u, v, w=None, detail=""):
        self.triple = (u, v, w)
        where = f"({u!r}, {v!r})" if w is None else f"({u!r}, {v!r}, {w!r})"
        super().__init__(f"metric violation at {where}{': ' + detail if detail else ''}")


class NegativeValue(InstanceError):
    def __init__(self, field, value=None):
        self.field = field
        super().__init__(f"negative or invalid value in {field}: {value!r}")


class DanglingReference(InstanceError):
    def __init__(self, field, ref=None):
        self.field = field
        super().__init__(f"{field} references unknown item {ref!r}")


class InfeasibleAssignment(PFLeError):
    def __init__(self, client, lease):
        self.client = client
        self.lease = lease
        super().__init__(f"client {client} is assigned to lease {lease} which does not cover it")


class CoverageHole(PFLeError):
    """A client that reaches a tentatively open lease found no covering purchased copy."""


class NonTermination(PFLeError):
    """The dual ascent exceeded its event budget. This is a solver bug."""


class MultipleReached(PFLeError):
    """A client reaches two leases of the independent set. This is a solver bug."""


class TooLarge(PFLeError):
    """The exact oracle refuses instances above its configured limits."""


class ParseError(PFLeError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)


class InvalidConfig(PFLeError, ValueError):
    pass
