from apps.sta_engine.main import cli

cli(prog_name="sta")
