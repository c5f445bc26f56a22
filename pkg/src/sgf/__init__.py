"""Spike Gating Flow: online few-shot gesture recognition over event streams.

The package covers the full desk-scale pipeline: event ingestion and
spike-count binning, the two-stage spatiotemporal noise filter, spatial
and temporal spiking detectors, single-pass histogram training with
bitwise-similarity scoring and hierarchical routing, the address-event
codec/FIFO model, cost-accounting tables, and a CLI over all of it.
"""

from ._backend import backend_name
from .errors import (
    ConfigError,
    GeometryError,
    SGFError,
    StreamFormatError,
    TranslationFault,
    UntrainedRouteError,
)
from .events import (
    EventStream,
    Frame,
    SpikeEvent,
    SyntheticGestureSpec,
    bin_frames,
    gen_synthetic,
    parse_event_stream,
    serialize_event_stream,
)
from .network import (
    CLASS_NAMES,
    FeatureVector,
    GlobalFeatureNeuron,
    OutputNeuron,
    SGFModel,
    SGFUnit,
    classify,
    extract_feature_vector,
    finalize_weights,
    knowledge_report,
    online_learn,
    route_hierarchy,
    score,
    train_sample,
)
from .stcore import STCoreParams, STRONG_PARAMS, WEAK_PARAMS, st_filter

__version__ = "0.1.0"

__all__ = [
    "CLASS_NAMES",
    "ConfigError",
    "EventStream",
    "FeatureVector",
    "Frame",
    "GeometryError",
    "GlobalFeatureNeuron",
    "OutputNeuron",
    "SGFError",
    "SGFModel",
    "SGFUnit",
    "STCoreParams",
    "STRONG_PARAMS",
    "SpikeEvent",
    "StreamFormatError",
    "SyntheticGestureSpec",
    "TranslationFault",
    "UntrainedRouteError",
    "WEAK_PARAMS",
    "backend_name",
    "bin_frames",
    "classify",
    "extract_feature_vector",
    "finalize_weights",
    "gen_synthetic",
    "knowledge_report",
    "online_learn",
    "parse_event_stream",
    "route_hierarchy",
    "score",
    "serialize_event_stream",
    "st_filter",
    "train_sample",
    "__version__",
]
