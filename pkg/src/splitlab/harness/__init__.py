"""Configuration, sweep execution, CSV/SVG output and the ``splitlab`` command."""
from .config import ConfigError, LinearSpec, Reference, RunSpec, SweepSpec, format_config, load_config, parse_config
from .figures import emit_figures
from .runner import ErrorRecord, read_summary, run_scenario, run_sweep
