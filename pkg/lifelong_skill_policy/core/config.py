from math import log

from .util import classproperty


class Config:
    """Configuration parameters shared by the environment, model and harness."""

    # Workspace and dynamics:

    """Lower/upper bound of both workspace coordinates."""
    WORKSPACE_LOW = 0.0
    WORKSPACE_HIGH = 1.0

    """Maximum effector displacement per axis and step."""
    MAX_STEP = 0.05

    """A closing gripper grasps the nearest free object within this radius."""
    GRASP_RADIUS = 0.03

    """A closed, empty gripper pushes free objects within this radius."""
    PUSH_RADIUS = 0.05

    """Minimum cosine between move and effector->object direction for a push."""
    PUSH_ALIGNMENT = 0.5

    """Radius of every goal region."""
    REGION_RADIUS = 0.08

    """Half-width of the uniform noise the scripted expert adds to delta_xy."""
    EXPERT_NOISE = 0.005

    """Number of object classes in the synthetic world."""
    NR_OBJECT_CLASSES = 6

    """Number of object slots in every scene (and in the observation layout)."""
    NR_OBJECT_SLOTS = 3

    """Minimum distance between two objects at the initial state."""
    MIN_OBJECT_SEPARATION = 0.1

    # Default horizons:
    SHORT_HORIZON = 80
    LONG_HORIZON = 160

    # Lifelong training:

    """A task may stop early once its success rate has reached this value."""
    EARLY_STOP_SUCCESS = 0.95

    # Numerics:

    """Norms below this value make the cosine similarity 0."""
    COSINE_EPS = 1e-12

    """Epsilon of layer normalization."""
    LAYER_NORM_EPS = 1e-5

    """Bounds of the GMM component standard deviations."""
    SIGMA_MIN = 1e-4
    SIGMA_MAX = 10.0

    # Gram-Schmidt residuals below this norm mean the span is exhausted.
    ORTHOGONALIZATION_TOL = 1e-10

    @classproperty
    def LOG_SIGMA_MIN(self):
        return log(self.SIGMA_MIN)

    @classproperty
    def LOG_SIGMA_MAX(self):
        return log(self.SIGMA_MAX)
