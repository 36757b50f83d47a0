# Copyright 2026 The NMWPM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Neural MWPM decoder toolkit: lattices, noise, matching, training and evaluation."""

from ._core import (
    BOUNDARY,
    Code,
    GroundTruthInfeasible,
    GroundTruthTimeout,
    Model,
    NoCrossing,
    __version__,
    config_to_text,
    edge_accuracy,
    estimate_threshold,
    histogram_density,
    mwpm,
    parse_results_csv,
    polarization,
    results_csv,
    train,
    wilson_interval,
)

__all__ = [
    "BOUNDARY",
    "Code",
    "GroundTruthInfeasible",
    "GroundTruthTimeout",
    "Model",
    "NoCrossing",
    "__version__",
    "config_to_text",
    "edge_accuracy",
    "estimate_threshold",
    "histogram_density",
    "mwpm",
    "parse_results_csv",
    "polarization",
    "results_csv",
    "train",
    "wilson_interval",
]
