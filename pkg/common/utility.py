import hashlib

import numpy as np
from django.conf import settings


def lab_setting(name, override=None):
    """
    Return the numerical default ``name`` from ``settings.DIRICHLET_LAB``.

    Args:
        name (str): Key of the ``DIRICHLET_LAB`` settings dict.
        override (optional): Value supplied by the caller; returned as is when
            not None.

    Returns:
        The configured value.
    """
    if override is not None:
        return override
    return settings.DIRICHLET_LAB[name]


def derive_seed(seed, *parts):
    """
    Derive an independent 128-bit seed from a base seed and a label path.

    The stream for (seed, check name, sample index) does not depend on the
    order in which samples are drawn, so sweeps are reproducible whatever the
    schedule.
    """
    h = hashlib.blake2b(digest_size=16)
    h.update(str(seed).encode('utf-8'))
    for part in parts:
        h.update(b'|')
        h.update(str(part).encode('utf-8'))
    return int.from_bytes(h.digest(), byteorder='big', signed=False)


def rng_for(seed, *parts):
    """Seeded PCG64 generator for the stream identified by ``parts``."""
    return np.random.default_rng(derive_seed(seed, *parts))


def sample_values(rng, size, value_range=None, heavy_range=None, heavy_rate=None):
    """
    Function values i.i.d. uniform on [-VALUE_RANGE, VALUE_RANGE]; each entry
    is redrawn from the wider [-HEAVY_TAIL_RANGE, HEAVY_TAIL_RANGE] with
    probability HEAVY_TAIL_RATE.
    """
    value_range = lab_setting('VALUE_RANGE', value_range)
    heavy_range = lab_setting('HEAVY_TAIL_RANGE', heavy_range)
    heavy_rate = lab_setting('HEAVY_TAIL_RATE', heavy_rate)
    values = rng.uniform(-value_range, value_range, size=size)
    heavy = rng.random(size=size) < heavy_rate
    return np.where(heavy, rng.uniform(-heavy_range, heavy_range, size=size), values)


def sample_alpha(rng, size=None, alpha_range=None):
    """Log-uniform on ALPHA_RANGE."""
    lo, hi = lab_setting('ALPHA_RANGE', alpha_range)
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))
