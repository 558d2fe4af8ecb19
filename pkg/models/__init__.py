from .settings import Settings, settings, TOOLKIT_NAME, TOOLKIT_VERSION
from .errors import MorsekitError
from .spin import SpinModel, PopulationDistribution
from .trace import SpectrumTrace, TraceKind
