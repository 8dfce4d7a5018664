from ._nrlab import *  # noqa: F401,F403
from ._nrlab import __doc__  # noqa: F401
