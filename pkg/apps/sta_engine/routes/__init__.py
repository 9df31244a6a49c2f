# apps/sta_engine/routes/__init__.py
# One click command per module; main.py wires them into the CLI group.
