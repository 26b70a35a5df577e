# Copyright 2026 The mdd Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Mispronunciation detection and diagnosis toolkit."""

from ._mdd import *  # noqa: F401,F403
from ._mdd import __version__  # noqa: F401

BLANK = 96
SOS = 96
EOS = 97
CTC_VOCAB_SIZE = 97
ATT_VOCAB_SIZE = 98
