"""
Root imports for the tno.shape.part_assembly package.

Reconstructs target shapes, given as volumetric point clouds, as assemblies of
rigidly posed parts retrieved from a part library.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

__version__ = "0.1.0"
