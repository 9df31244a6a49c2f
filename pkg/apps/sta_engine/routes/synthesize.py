import click

from apps.sta_engine.routes.options import config_option, nu_option, out_option, protocol_option, read_config, seedless_option
from apps.sta_engine.services.harness.runner import synthesize_point
from apps.sta_engine.utils.envelope import emit, guarded, ok


@click.command("synthesize")
@config_option
@out_option
@protocol_option
@nu_option
@seedless_option
@guarded
def synthesize(config_path, out, protocol, nu, seedless):
    """Write the corrected pulse table for one (protocol, ν) point."""
    config = read_config(config_path)
    build, frame = synthesize_point(config, protocol, nu, out=out or config.output.directory)
    corrected = build.corrected.to_dict() if build.corrected is not None else None
    emit(ok(
        {"protocol": build.protocol, "nu": build.nu, "rows": int(frame.shape[0]),
         "leakage_max": build.leakage.max_abs, "correction": corrected},
        meta={"window": list(build.schedule.window), "dt": build.schedule.dt},
    ))
