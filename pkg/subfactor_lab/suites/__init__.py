"""
Verification suites.

Suites are grouped by topic in ``SuiteGroup`` objects and registered into the
module-level ``registry``. Each suite receives a ``VerificationContext`` and
returns ``(residuals, details)``; the runner times it and turns any exception
into an error entry so one broken suite never hides the others.
"""
import logging
import time
from dataclasses import dataclass, field

from subfactor_lab.algebra.tower import Tower, feasible_depth
from subfactor_lab.config import get_config
from subfactor_lab.errors import DepthError, PreconditionError
from subfactor_lab.models.report import SuiteResult, VerificationReport
from subfactor_lab.utils.cache import cached_suite

logger = logging.getLogger(__name__)

ALL = 'all'


@dataclass(frozen=True)
class Suite:
    name: str
    statement: str
    min_depth: int
    func: object
    aliases: tuple = ()


class SuiteGroup:
    """A named collection of suites, registered into a SuiteRegistry as a unit."""

    def __init__(self, name):
        self.name = name
        self.suites = []

    def suite(self, name, statement, min_depth=0, aliases=()):
        def decorator(f):
            self.suites.append(Suite(name, statement, min_depth, f, tuple(aliases)))
            return f
        return decorator


class SuiteRegistry:
    def __init__(self):
        self._suites = {}
        self._aliases = {}

    def register_group(self, group):
        for suite in group.suites:
            if suite.name in self._suites or suite.name in self._aliases:
                raise ValueError(f"suite '{suite.name}' is registered twice")
            self._suites[suite.name] = suite
            for alias in suite.aliases:
                if alias in self._suites or alias in self._aliases:
                    raise ValueError(f"alias '{alias}' is registered twice")
                self._aliases[alias] = suite.name

    def names(self):
        return list(self._suites)

    def aliases(self):
        return dict(self._aliases)

    def canonical(self, name):
        return self._aliases.get(name, name)

    def get(self, name):
        return self._suites[self.canonical(name)]

    def resolve(self, names):
        """Expand 'all', map aliases and reject unknown names, keeping registration order."""
        names = [self.canonical(name) for name in names] or [ALL]
        if ALL in names:
            return self.names()
        unknown = [name for name in names if name not in self._suites]
        if unknown:
            raise PreconditionError(
                f"unknown suite(s) {', '.join(unknown)}; valid suites: "
                f"{', '.join(self.names() + list(self._aliases) + [ALL])}")
        return [name for name in self.names() if name in names]


registry = SuiteRegistry()


@dataclass(eq=False)
class VerificationContext:
    spec: object
    tower: Tower
    seed: int
    tol: float
    samples: int
    cache: object = None
    automorphism: object = field(default=None, repr=False)

    @property
    def inclusion(self):
        return self.tower.inclusion

    @property
    def depth(self):
        return self.tower.depth


def choose_depth(inclusion, requested=None, declared=None):
    """
    Tower depth for a run: the request, else the spec file's depth, else DEFAULT_DEPTH.

    Only the default is clipped to the feasible depth; an explicit request
    beyond it raises DepthError.
    """
    config = get_config()
    available = feasible_depth(inclusion)
    depth = requested if requested is not None else declared
    if depth is None:
        return min(config.DEFAULT_DEPTH, available)
    if depth > available:
        raise DepthError(
            f"depth {depth} exceeds the feasible depth {available} of this inclusion",
            needed=depth, available=available)
    return depth


def build_context(spec, depth=None, seed=None, tol=None, samples=None, cache=None):
    """Build the tower for ``spec`` and wrap it with the run settings."""
    config = get_config()
    seed = config.SEED if seed is None else seed
    tol = config.TOLERANCE if tol is None else tol
    samples = config.SAMPLES if samples is None else samples
    inclusion = spec.inclusion()
    depth = choose_depth(inclusion, depth, spec.depth)
    tower = Tower(inclusion, depth=depth, seed=seed, tol=tol)
    automorphism = spec.automorphism(tower.inclusion)
    return VerificationContext(spec, tower, seed, tol, samples, cache, automorphism)


@cached_suite(key_prefix='suite')
def run_suite(context, name):
    suite = registry.get(name)
    result = SuiteResult(suite.name, suite.statement, context.tol)
    if context.depth < suite.min_depth:
        result.skipped = f"needs depth {suite.min_depth}, tower has depth {context.depth}"
        logger.info(f"Suite {name} skipped: {result.skipped}")
        return result
    start = time.perf_counter()
    try:
        residuals, details = suite.func(context)
        result = SuiteResult(suite.name, suite.statement, context.tol, residuals, details)
    except Exception as e:
        logger.error(f"Error running suite {name}: {e}")
        result.error = f"{type(e).__name__}: {e}"
    result.wall_time = time.perf_counter() - start
    logger.info(f"Suite {name}: {result.status} in {result.wall_time:.2f}s")
    return result


def run_suites(context, names=()):
    """Run the named suites (all when empty) in registration order."""
    report = VerificationReport(context.spec.name, context.seed, context.depth, context.tol)
    for name in registry.resolve(names):
        report.suites.append(run_suite(context, name))
    return report


# Import suite modules after the registry exists
from subfactor_lab.suites.tower import tower_suites  # noqa: E402
from subfactor_lab.suites.bases import basis_suites  # noqa: E402
from subfactor_lab.suites.automorphisms import automorphism_suites  # noqa: E402
from subfactor_lab.suites.multistep import multistep_suites  # noqa: E402

registry.register_group(tower_suites)
registry.register_group(basis_suites)
registry.register_group(automorphism_suites)
registry.register_group(multistep_suites)
