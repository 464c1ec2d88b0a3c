from .config import RunConfig, parse_config
from .main import main
from .output import ResultTable, emit

__all__ = ["RunConfig", "ResultTable", "emit", "main", "parse_config"]
