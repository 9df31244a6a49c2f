# apps/sta_engine/main.py
import logging
from typing import Optional

import click

from apps.sta_engine.config.settings import settings
from apps.sta_engine.services.admin.logger import configure_logging, log_event

from apps.sta_engine.routes.synthesize import synthesize
from apps.sta_engine.routes.simulate import simulate
from apps.sta_engine.routes.sweep import sweep
from apps.sta_engine.routes.oracle import oracle
from apps.sta_engine.routes.mu_report import mu_report
from apps.sta_engine.routes.compare import compare

log = logging.getLogger("sta.main")


# -------------------------------------------------------------------
# Root group
# -------------------------------------------------------------------
@click.group(help="Shortcut-to-adiabaticity pulse synthesis for lossy Λ-system transfer into a waveguide.")
@click.version_option(settings.STA_VERSION, prog_name="sta")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Overrides STA_LOG_LEVEL.",
)
def cli(log_level: Optional[str]) -> None:
    configure_logging(level=log_level)
    log_event(log, "cli_start", logging.DEBUG, version=settings.STA_VERSION)


# -------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------
cli.add_command(synthesize)
cli.add_command(simulate)
cli.add_command(sweep)
cli.add_command(oracle)
cli.add_command(mu_report)
cli.add_command(compare)


if __name__ == "__main__":
    cli()
