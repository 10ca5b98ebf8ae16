from utirisk.data.types import (
    DEFAULT_NODES,
    DEFAULT_PHYS_CHANNELS,
    Corpus,
    DailyActivityMatrix,
    LabeledDay,
    Label,
    PhysReading,
    Provenance,
    SensorEvent,
)
from utirisk.data.sfp import build_sfp, daily_phys, label_uti_window
from utirisk.data.synthetic import GeneratorConfig, generate_synthetic, no_uti_within
from utirisk.data.io import (
    LoadReport,
    load_corpus,
    load_events,
    load_phys,
    loads_events,
    save_corpus,
    write_events_csv,
    write_events_jsonl,
)

__all__ = [
    "DEFAULT_NODES",
    "DEFAULT_PHYS_CHANNELS",
    "Corpus",
    "DailyActivityMatrix",
    "LabeledDay",
    "Label",
    "PhysReading",
    "Provenance",
    "SensorEvent",
    "build_sfp",
    "daily_phys",
    "label_uti_window",
    "GeneratorConfig",
    "generate_synthetic",
    "no_uti_within",
    "LoadReport",
    "load_corpus",
    "load_events",
    "load_phys",
    "loads_events",
    "save_corpus",
    "write_events_csv",
    "write_events_jsonl",
]
