"""Exception hierarchy shared by the solver modules."""


class KerrMagError(Exception):
    """Base class for all errors raised by kerrmag."""


class DomainError(KerrMagError, ValueError):
    """An argument lies outside the domain of the operation."""


class Degenerate(KerrMagError):
    """The magnon-number polynomial vanishes identically (to rounding)."""


class NoPhysicalRoot(KerrMagError):
    """No real nonnegative magnon number solves the steady-state equation."""


class SingularPoint(KerrMagError):
    """|A| == |B| at the requested magnon number, so m_s is undefined."""


class EigenSolverError(KerrMagError):
    """The eigenvalue routine failed on a Jacobian."""


class Diverged(KerrMagError):
    """Time integration left the bounded region (e.g. above parametric threshold)."""

    def __init__(self, message, abscissa=None, time=None):
        super().__init__(message)
        self.abscissa = abscissa
        self.time = time


class NoStableBranch(KerrMagError):
    """None of the steady states is linearly stable."""


class ConfigError(KerrMagError, ValueError):
    """Malformed run configuration; carries the offending key and line."""

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
