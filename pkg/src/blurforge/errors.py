"""Exception types shared across the toolkit."""


class BlurforgeError(Exception):
    """Base class for all toolkit errors."""


class CanvasTooSmall(BlurforgeError):
    """Requested kernel canvas cannot hold the centered trajectory.

    Carries ``required`` -- the smallest odd side that would fit.
    """

    def __init__(self, canvas: int, required: int):
        self.canvas = canvas
        self.required = required
        super().__init__(
            f"canvas {canvas} too small for trajectory, need at least {required}"
        )


class MalformedKernelFile(BlurforgeError):
    """Kernel file failed magic, dimension, or invariant checks."""


class DimensionMismatch(BlurforgeError):
    """Two images or frames that must match in shape do not."""


class ImageTooSmall(BlurforgeError):
    """Image is below the minimum size an operation requires."""


class InsufficientFrames(BlurforgeError):
    """Frame sequence is shorter than the largest window that may be drawn."""


class MissingFile(BlurforgeError):
    """A referenced input file does not exist."""


class EmptyDataset(BlurforgeError):
    """An evaluation or build was asked to run over zero pairs."""


class EmptyInput(BlurforgeError):
    """Input directory contains no usable images."""


class UnwritableOutput(BlurforgeError):
    """Output directory cannot be created or written."""
