import click

from apps.sta_engine.routes.options import config_option, out_option, read_config, seedless_option, threads_option
from apps.sta_engine.services.harness.runner import run
from apps.sta_engine.utils.envelope import emit, guarded, ok


@click.command("sweep")
@config_option
@out_option
@threads_option
@seedless_option
@guarded
def sweep(config_path, out, threads, seedless):
    """Run every configured protocol over the ν sweep (figure data)."""
    config = read_config(config_path)
    result = run(config, out, threads=threads)
    emit(ok(
        {"directory": str(result.directory), "points": len(result.records), "failed": result.meta["failed"]},
        meta={"threads": result.meta["threads"]},
    ))
