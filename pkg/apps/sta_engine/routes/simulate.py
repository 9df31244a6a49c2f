import click

from apps.sta_engine.routes.options import config_option, nu_option, out_option, protocol_option, read_config, seedless_option
from apps.sta_engine.services.harness.runner import simulate_point
from apps.sta_engine.utils.envelope import emit, guarded, ok


@click.command("simulate")
@config_option
@out_option
@protocol_option
@nu_option
@seedless_option
@guarded
def simulate(config_path, out, protocol, nu, seedless):
    """Propagate one point and write its full trajectory and temporal mode."""
    config = read_config(config_path)
    output = simulate_point(config, protocol, nu, out=out or config.output.directory)
    emit(ok(output.record.to_row(), meta={"runtime": output.record.runtime}))
