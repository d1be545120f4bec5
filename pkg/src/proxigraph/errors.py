"""Exception hierarchy. Every error carries a stable machine-readable code
that the HTTP layer maps into error documents."""


class ProxigraphError(Exception):
    code = "internal_error"


class InvalidIdentity(ProxigraphError):
    code = "invalid_identity"


class InvalidConfig(ProxigraphError):
    code = "invalid_config"


class InvalidStream(ProxigraphError):
    code = "invalid_stream"


class EmptyWindow(ProxigraphError):
    code = "empty_window"


class ModelMismatch(ProxigraphError):
    code = "model_mismatch"


class InvalidGeofence(ProxigraphError):
    code = "invalid_geofence"


class InvalidEvent(ProxigraphError):
    code = "invalid_event"


class UnknownAssociate(ProxigraphError):
    code = "unknown_associate"


class InvalidDistance(ProxigraphError):
    code = "invalid_distance"


class DegenerateTraining(ProxigraphError):
    code = "degenerate_training"


class InvalidEnvelope(ProxigraphError):
    code = "invalid_envelope"


class InvalidParameter(ProxigraphError):
    code = "invalid_parameter"
