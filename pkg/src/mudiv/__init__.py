"""K-active-user greedy-access scheduling: BER, energy split and optimal K."""
from .asymptotics import *  # noqa: F401,F403
from .ber import *  # noqa: F401,F403
from .energy import *  # noqa: F401,F403
from .experiments import ExperimentSpec, SpecError, run_experiment
from .optimize import *  # noqa: F401,F403
from .sim import *  # noqa: F401,F403
from .specfun import *  # noqa: F401,F403
from .validate import CheckResult, validate_against_oracles

__version__ = "0.1.0"
