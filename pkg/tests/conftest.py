"""Suite-wide pytest configuration."""

from hypothesis import settings

# property sweeps run sub-millisecond numerics; the deadline only ever
# fires on cold-start jitter, so it is disabled
settings.register_profile("lab", deadline=None)
settings.load_profile("lab")
