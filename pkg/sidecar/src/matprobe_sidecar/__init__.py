"""HTTP fill-mask sidecar and masked-LM domain-adaptation trainer."""

__version__ = "0.1.0"
