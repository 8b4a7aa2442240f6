"""Resource caps.  Each cap can be overridden through an environment variable."""

import os

DENSE_CAP_ENV = "PERFECTMC_DENSE_CAP"
MAX_BITS_ENV = "PERFECTMC_MAX_BITS"
STATE_CAP_ENV = "PERFECTMC_STATE_CAP"
MAX_T_ENV = "PERFECTMC_MAX_T"

_DEFAULTS = {
    DENSE_CAP_ENV: 5000,
    MAX_BITS_ENV: 1 << 20,
    STATE_CAP_ENV: 10**6,
    MAX_T_ENV: 1 << 16,
}


def _read(name):
    raw = os.environ.get(name)
    if raw is None:
        return _DEFAULTS[name]
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {raw!r}")
    return value


def dense_cap():
    """Largest state space for which dense matrices are built."""
    return _read(DENSE_CAP_ENV)


def max_bits():
    """Largest bit length allowed for an entry of an exact matrix power."""
    return _read(MAX_BITS_ENV)


def state_cap():
    """Largest number of states a gallery enumeration may produce."""
    return _read(STATE_CAP_ENV)


def max_t():
    """Largest chain length a brute-force mixing search may try."""
    return _read(MAX_T_ENV)
