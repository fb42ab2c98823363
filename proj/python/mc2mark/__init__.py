# Copyright 2026 The mc2mark Authors
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
"""Multi-bit distortion-free watermarking for token sequences."""

from mc2mark._core import (
    Error,
    attack,
    config_hash,
    detect,
    embed,
    key_vectors,
    load_config,
    reweight,
    validate_config,
    watermark_step,
)

__all__ = [
    "Error",
    "attack",
    "config_hash",
    "detect",
    "embed",
    "key_vectors",
    "load_config",
    "reweight",
    "validate_config",
    "watermark_step",
]
