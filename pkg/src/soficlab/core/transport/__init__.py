from soficlab.core.transport.kantorovich import (
    Coupling,
    Criterion,
    DistanceCertificate,
    close,
    close_value,
    cost_matrix,
    ground_distance,
    kantorovich,
    metric_sandwich,
    total_variation,
    transport_value,
)

__all__ = [
    "Coupling",
    "Criterion",
    "DistanceCertificate",
    "close",
    "close_value",
    "cost_matrix",
    "ground_distance",
    "kantorovich",
    "metric_sandwich",
    "total_variation",
    "transport_value",
]
