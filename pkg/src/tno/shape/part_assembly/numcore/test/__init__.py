"""
Testing module of the tno.shape.part_assembly.numcore package.
"""
