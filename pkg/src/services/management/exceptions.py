class ToolkitError(Exception):
    pass


class GroupMismatchError(ToolkitError):
    pass


class ResourceCapError(ToolkitError):
    pass


class ConfigurationError(ToolkitError):
    pass


class ConfigParseError(ConfigurationError):
    pass


class ChainError(ToolkitError):
    pass


class ScopeError(ToolkitError):
    pass


class PreconditionError(ToolkitError):
    pass


class InputError(ToolkitError):
    pass


class LiftError(ToolkitError):
    pass


class CertificateError(ToolkitError):
    pass


class FileAccessError(ToolkitError):
    pass
