import click

from apps.sta_engine.config.experiment import ExperimentConfig, load_config

config_option = click.option(
    "--config", "config_path", required=True,
    type=click.Path(dir_okay=False, path_type=str), help="Experiment YAML/JSON file.",
)
out_option = click.option(
    "--out", "out", default=None,
    type=click.Path(file_okay=False, path_type=str), help="Output directory (overrides output.directory).",
)
threads_option = click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker processes.")
seedless_option = click.option(
    "--seedless", is_flag=True, default=False,
    help="No-op: every computation is deterministic and no RNG is used.",
)
nu_option = click.option("--nu", type=float, default=None, help="Protocol speed (defaults to the first sweep value).")
protocol_option = click.option("--protocol", default=None, help="Protocol name (defaults to the first configured).")


def read_config(path: str) -> ExperimentConfig:
    return load_config(path)
