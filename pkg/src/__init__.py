"""Dynamic simulator for low-temperature district heating/cooling networks with a seasonal ice storage."""

__version__ = "0.1.0"
