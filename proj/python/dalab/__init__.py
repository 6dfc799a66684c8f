from ._dalab import *  # noqa: F401,F403
