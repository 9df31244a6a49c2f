import click

from apps.sta_engine.routes.options import config_option, out_option, read_config, seedless_option
from apps.sta_engine.services.harness.runner import run_oracle
from apps.sta_engine.utils.envelope import emit, guarded, ok


@click.command("oracle")
@config_option
@out_option
@seedless_option
@guarded
def oracle(config_path, out, seedless):
    """Compare the Markovian model against the discretized waveguide continuum."""
    config = read_config(config_path)
    table = run_oracle(config, out or config.output.directory)
    emit(ok(table.to_dict("records")))
