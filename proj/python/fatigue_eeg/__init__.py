"""Single-channel EEG fatigue detection pipeline."""

from ._fatigue import *  # noqa: F401,F403
