from ._core import (
    ConfigError,
    SicyigError,
    __version__,
    default_config_json,
    deer_fit,
    deer_signal,
    find_xopt,
    homogeneity,
    lattice_from_zpl,
    mc_oracle,
    nanobeam_widths,
    poisson_histogram,
    r_opt,
    reproduce,
    resonance_fields,
    run_cli,
    stripe_field,
    swr_lines,
    tm_bands,
    usable_yield,
)
