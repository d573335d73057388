"""Distribution-sensitive journal indicators (I3, I3/N) next to JIF and CiteScore."""

__version__ = "0.1.0"
