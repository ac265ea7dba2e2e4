"""Multi-task supervised PCA classifiers and their large-dimensional theory.

Indices are 0-based. Samples are stored column-wise (p x n), grouped by
(task, class) in task-major order.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
