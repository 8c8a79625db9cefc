"""Young differential equations driven by Hoelder-continuous paths.

Thin python surface over the C++ core: exact fBm sampling, Young integrals
in Riemann-Stieltjes and fractional-derivative form, mild/Euler solvers,
the Doss-Sussmann transform and the unit-interval stability iteration.
"""

try:
    from hoelderflow._core import *  # noqa: F401,F403
    from hoelderflow._core import __version__  # noqa: F401
except ImportError:  # build-tree layout: _core sits on sys.path unpackaged
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
