"""
Testing module of the tno.shape.part_assembly.geom package.
"""
