"""Exception hierarchy shared by all hyperroots modules."""


class HyperRootError(Exception):
    """Base class for every error raised by this package."""


class NotShipped(HyperRootError, KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(f"unknown system {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


class InternalConsistency(HyperRootError):
    """A quantity computed along two routes disagreed."""


class UngradedModule(HyperRootError, ValueError):
    """The fusion graph carries no consistent Z3 grading."""


class BasisDegenerate(HyperRootError):
    pass


class NotInLattice(HyperRootError):
    pass


class NotPositiveDefinite(HyperRootError, ValueError):
    pass


class BudgetExceeded(HyperRootError):
    """Lattice enumeration would visit more nodes than allowed."""

    def __init__(self, budget, visited=None):
        self.budget = budget
        self.visited = visited
        msg = f"enumeration exceeded the node budget of {budget:,}"
        if visited is not None:
            msg += f" (visited {visited:,} before stopping)"
        super().__init__(msg)


class Inconclusive(HyperRootError):
    """Signed-permutation search ran out of its node budget."""


class FractionalExponent(HyperRootError, ValueError):
    pass
