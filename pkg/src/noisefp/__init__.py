"""noisefp: classify simulated quantum devices by their noise fingerprint.

Pipeline: build the probe circuit, evolve it through per-step cuts on noisy
virtual devices, sample shot counts in FAST or SLOW campaigns, turn count
records into outcome-probability feature vectors, and train kernel SVMs
that tell devices (or time windows of one device) apart.
"""

__version__ = "0.1.0"

from .acquisition import (
    Campaign,
    RunRecord,
    export_records,
    import_records,
    run_campaign,
)
from .circuit import (
    Circuit,
    Gate,
    GateKind,
    StepPlan,
    build_testbed,
    cnot,
    hadamard,
    pauli_x,
    prefix,
    step_plan,
    toffoli,
)
from .dataset import (
    LabeledDataset,
    build_machine_dataset,
    build_timeseries_dataset,
    load_csv,
    probabilities,
    save_csv,
    split,
    take,
)
from .errors import (
    DataFormatError,
    InvalidArgumentError,
    NoiseFpError,
    NumericError,
)
from .kernels import Kernel, gram, kernel_matrix, linear, poly, rbf
from .reproduce import (
    PipelineConfig,
    load_config,
    load_packaged_config,
    packaged_config_names,
    run_benchmark,
    write_report,
)
from .simulator import (
    DriftSpec,
    NoiseModel,
    VirtualDevice,
    exact_distribution,
    ideal_distribution,
    load_device,
    sample_counts,
    save_device,
    step_distributions,
)
from .svm import (
    OvaModel,
    OvoModel,
    SelectionReport,
    SvmModel,
    load_model,
    model_select,
    predict,
    predict_ova,
    predict_ovo,
    save_model,
    train_binary,
    train_ova,
    train_ovo,
)

__all__ = [
    "Campaign",
    "Circuit",
    "DataFormatError",
    "DriftSpec",
    "Gate",
    "GateKind",
    "InvalidArgumentError",
    "Kernel",
    "LabeledDataset",
    "NoiseFpError",
    "NoiseModel",
    "NumericError",
    "OvaModel",
    "OvoModel",
    "PipelineConfig",
    "RunRecord",
    "SelectionReport",
    "StepPlan",
    "SvmModel",
    "VirtualDevice",
    "build_machine_dataset",
    "build_testbed",
    "build_timeseries_dataset",
    "cnot",
    "exact_distribution",
    "export_records",
    "gram",
    "hadamard",
    "ideal_distribution",
    "import_records",
    "kernel_matrix",
    "linear",
    "load_config",
    "load_csv",
    "load_device",
    "load_model",
    "load_packaged_config",
    "model_select",
    "packaged_config_names",
    "pauli_x",
    "poly",
    "predict",
    "predict_ova",
    "predict_ovo",
    "prefix",
    "probabilities",
    "rbf",
    "run_benchmark",
    "run_campaign",
    "save_csv",
    "save_device",
    "save_model",
    "split",
    "step_distributions",
    "step_plan",
    "take",
    "toffoli",
    "train_binary",
    "train_ova",
    "train_ovo",
    "write_report",
    "__version__",
]
