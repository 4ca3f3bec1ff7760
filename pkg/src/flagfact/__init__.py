"""Flag-relative factorizations over involutive algebras."""

from .algebra import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .factorization import *  # noqa: F401,F403
from .flags import *  # noqa: F401,F403
from .manifold import *  # noqa: F401,F403

__version__ = "0.1.0"
