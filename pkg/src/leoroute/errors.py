"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """A scenario configuration field is missing, unknown, or invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class NoRouteError(RuntimeError):
    """No path exists between the requested endpoints."""


class LinkInfeasibleError(ValueError):
    """Operation on a link whose data rate is zero."""


class ScenarioInfeasibleError(RuntimeError):
    """Scenario cannot be simulated (e.g. a gateway has a zero-rate GSL)."""


class RoutingContractError(RuntimeError):
    """A router handed the engine a next hop that is not a current edge."""
