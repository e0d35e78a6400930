from .cubic import BinaryCubicForm, count_totally_real_cubic, cubic_form_disc, cubic_forms, census_cubic
from .quadratic import census_quadratic, count_real_quadratic, fundamental_discriminants
from .stream import CensusResult, ConfigError, Shard


def census_stream(kind: str, disc_limit: int, shard_spec=1, threads: int = 1, checkpoint=None, emit_dir=None):
    """Per-shard records for either census kind."""
    if kind == "quadratic":
        return census_quadratic(disc_limit, shard_spec, threads, checkpoint, emit_dir)
    if kind == "cubic":
        return census_cubic(disc_limit, shard_spec, threads, checkpoint, emit_dir)
    raise ValueError(f"unknown census kind {kind!r}")


__all__ = [
    "BinaryCubicForm",
    "CensusResult",
    "ConfigError",
    "Shard",
    "census_stream",
    "count_real_quadratic",
    "count_totally_real_cubic",
    "cubic_form_disc",
    "cubic_forms",
    "fundamental_discriminants",
]
