"""Mirror game simulator and the adversarial Bob against open-book Alice."""

__version__ = "0.1.0"
