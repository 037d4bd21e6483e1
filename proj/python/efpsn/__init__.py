# Copyright 2026 The EFPSN Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the efpsn C++ core."""

from efpsn._core import (
    Error,
    budget,
    build_basis,
    compute_a,
    decrypt,
    encrypt,
    generate_keypair,
    homomorphic_add,
    idlg_label,
    network,
    phase1,
    run_accuracy_experiment,
    run_privacy_experiment,
    vq_norm,
    zeta,
)

__all__ = [
    "Error",
    "budget",
    "build_basis",
    "compute_a",
    "decrypt",
    "encrypt",
    "generate_keypair",
    "homomorphic_add",
    "idlg_label",
    "network",
    "phase1",
    "run_accuracy_experiment",
    "run_privacy_experiment",
    "vq_norm",
    "zeta",
]
