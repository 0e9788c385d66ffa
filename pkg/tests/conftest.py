import logging

from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# schedule-step progress lines are noise under pytest
logging.getLogger("infmat").setLevel(logging.WARNING)
