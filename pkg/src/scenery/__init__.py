"""scenery: a scene-graph toolchain for a defined X3D subset.

Parses and serializes the XML encoding, round-trips scenes through the
compact S3DB1 binary format, benchmarks the size reduction, simulates the
event model deterministically, and generates the Georgia/Savannah composite
demo scene at desk scale.
"""

__version__ = "0.1.0"
