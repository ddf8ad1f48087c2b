# Copyright 2026 The qvib Authors
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


"""Block-encoded vibrational dynamics: grids, channels, circuits, simulation, spectra."""

from ._qvib import *  # noqa: F401,F403
from ._qvib import (  # noqa: F401
    DomainError,
    IncompleteError,
    ParseError,
    PipelineConfig,
)

__version__ = "0.1.0"


def run_pipeline(config=None, outdir=None):
    """Run every stage into ``outdir`` and return the one-line stage summaries."""
    from . import _qvib

    cfg = config if config is not None else PipelineConfig()
    if outdir is not None:
        cfg.outdir = str(outdir)
    stages = (
        _qvib.cmd_build,
        _qvib.cmd_factorize,
        _qvib.cmd_compile,
        _qvib.cmd_run,
        _qvib.cmd_analyze,
        _qvib.cmd_report,
    )
    return [stage(cfg) for stage in stages]
