"""
Entry point of `python -m tno.shape.part_assembly`.
"""

from tno.shape.part_assembly.pipeline.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
