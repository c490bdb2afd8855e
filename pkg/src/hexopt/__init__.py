"""Power-density optimization of counterflow parallel plate heat exchangers with wall axial conduction."""

from .catalog import *  # noqa: F401,F403
from .dimensional import *  # noqa: F401,F403
from .estimator import DesignEvaluator, PowerDensityOptimizer
from .optimize import *  # noqa: F401,F403
from .runner import *  # noqa: F401,F403
from .thermal import *  # noqa: F401,F403

from . import catalog, dimensional, optimize, runner, thermal

__version__ = "0.1.0"

__all__ = (
    thermal.__all__
    + optimize.__all__
    + dimensional.__all__
    + catalog.__all__
    + runner.__all__
    + ["PowerDensityOptimizer", "DesignEvaluator", "__version__"]
)
