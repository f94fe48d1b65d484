class ConfigError(ValueError):
    """Invalid configuration or parameter domain.

    ``path`` holds the dotted key path of the offending entry when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
