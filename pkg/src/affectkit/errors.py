"""Shared exception types.

Every error raised by this package derives from AffectKitError so callers
(and the CLI exit-code mapping) can distinguish our failures from bugs.
"""

from __future__ import annotations


class AffectKitError(Exception):
    """Base class for all errors raised by affectkit."""


class InvalidArgumentError(AffectKitError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidStateError(AffectKitError, RuntimeError):
    """An object holds values it must never hold (e.g. non-finite weights)."""


class DivergedError(AffectKitError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, step: int, loss: float):
        super().__init__(f"training diverged at step {step}: loss={loss!r}")
        self.step = step
        self.loss = loss


class ConfigurationError(AffectKitError):
    """A topology, workload, or run configuration is inconsistent."""


class EmptyDatasetError(AffectKitError):
    """Similarity is undefined against a dataset with no centroids."""


class CodecError(AffectKitError):
    """Base class for wire-format encode/decode failures."""


class FormatError(CodecError):
    """The byte stream does not start with the expected magic."""


class TruncationError(CodecError):
    """The byte stream length disagrees with its declared payload length."""


class ChecksumError(CodecError):
    """The trailing CRC-32 does not match the frame contents."""


class UnsupportedError(CodecError):
    """The frame declares a message type this codec does not know."""


class TooLargeError(CodecError):
    """A field exceeds the range its wire encoding can carry."""
