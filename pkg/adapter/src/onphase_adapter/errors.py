"""Adapter error types."""


class AdapterError(Exception):
    """Base class for adapter failures."""


class ResolutionError(AdapterError):
    """Model or tokenizer could not be resolved locally or via the hub."""


class DataError(AdapterError):
    """Checkpoint matrix unusable (non-finite entries); nothing is written."""


class ConsistencyError(AdapterError):
    """Tokenizer ids exceed the embedding vocabulary (mismatched artifacts)."""


class RangeError(AdapterError):
    """Token id outside the tokenizer's vocabulary."""


class ParseError(AdapterError):
    """Malformed generation record; message names the line."""
