import click

from apps.sta_engine.routes.options import config_option, out_option, read_config, seedless_option
from apps.sta_engine.services.harness.runner import mu_profile_report
from apps.sta_engine.utils.envelope import emit, guarded, ok


@click.command("mu-report")
@config_option
@out_option
@seedless_option
@guarded
def mu_report(config_path, out, seedless):
    """μ(t) of the single-control dressing on [t_i, t₀/2] for every ν."""
    config = read_config(config_path)
    profiles, summary = mu_profile_report(config, out or config.output.directory)
    emit(ok(summary.to_dict("records"), meta={"samples": int(profiles.shape[0])}))
