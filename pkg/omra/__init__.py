# OMRA: Online Motion Resolution Adaptation codec
__version__ = "0.1.0"
