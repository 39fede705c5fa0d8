"""Error hierarchy shared by every stage of the forecasting pipeline."""


class PipelineError(Exception):
    """Exception raised for errors in a pipeline stage.

    Attributes:
        stage -- the stage that raised the error (imaging, ingest, ...)
        message -- explanation of the error
        original_error -- the original exception that was raised (if any)
    """

    exit_code = 2

    def __init__(self, stage: str, message: str, original_error=None):
        self.stage = stage
        self.message = message
        self.original_error = original_error
        super().__init__(f"{stage} error: {message}")


class ImagingError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("imaging", message, original_error)


class ClusteringError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("clustering", message, original_error)


class FeatureError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("features", message, original_error)


class LearningError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("learning", message, original_error)


class EvaluationError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("evaluation", message, original_error)


class IngestError(PipelineError):
    def __init__(self, message: str, original_error=None):
        super().__init__("ingest", message, original_error)


class ImageLoadError(IngestError):
    """Unreadable, missing or corrupt image file."""

    def __init__(self, path: str, message: str, original_error=None):
        self.path = path
        super().__init__(f"{path}: {message}", original_error)


class UnsupportedImageFormat(IngestError):
    """The file decodes, but not as PNG or JPEG."""

    def __init__(self, path: str, fmt: str):
        self.path = path
        self.format = fmt
        super().__init__(f"{path}: unsupported image format '{fmt}' (expected PNG or JPEG)")


class IngestFormatError(IngestError):
    """Too many malformed lines: the file is probably in the wrong format."""


class ConfigError(PipelineError):
    exit_code = 1

    def __init__(self, message: str, original_error=None):
        super().__init__("config", message, original_error)
