"""Risk aggregation for portfolios with FGM dependence."""

try:
    from ._fgmrisk import *  # noqa: F401,F403
except ImportError:  # build-tree layout: the extension sits on sys.path directly
    from _fgmrisk import *  # noqa: F401,F403
