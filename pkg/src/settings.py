import os

DEFAULT_MAX_PAIRS = 5_000_000
DEFAULT_ORACLE_CAP = 200_000
MAX_PAIRS_ENV = "HYBIS_MAX_PAIRS"
ORACLE_CAP_ENV = "HYBIS_ORACLE_CAP"
DEFAULT_CONFIG_PATH = os.path.join("configs", "default.json")
MODELS_DIR = "models"

STX = "stx"
STY = "sty"

SLOT_PREFIX = "x"  # slots are named x1..xk
SENTENCE_SLACK = 2  # extra formula size searched for a sentence-like separator
SEPARATOR_MAX_SIZE = 14

LEFT_TAG = "A:"
RIGHT_TAG = "B:"

RED = '\033[31m'
GREEN = '\033[32m'
YELLOW = '\033[33m'
CYAN = '\033[36m'
RESET = '\033[0m'


def slot_names(k: int):
    """
    Default slot names for a tuple of length k.

    Args:
        k (int): Tuple length.

    Returns:
        Tuple[str, ...]: ("x1", ..., "xk").
    """
    return tuple(f"{SLOT_PREFIX}{j}" for j in range(1, k + 1))


def resolve_limit(explicit, env_name: str, default: int) -> int:
    """
    Pick a resource limit: an explicit value wins, then the environment, then the default.

    Raises:
        ValueError: If the environment variable is not an integer.
    """
    if explicit is not None:
        return int(explicit)
    value = os.environ.get(env_name)
    return int(value) if value else default
