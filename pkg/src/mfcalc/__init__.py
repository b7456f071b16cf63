"""Exact calculus for matrix factorizations over the two curve
singularities of countable representation type, and their lifts by
added squares.

Subpackages: polyring (exact sparse polynomials and ring descriptors),
fields (rational and odd-prime coefficient fields), mfcore (matrix
factorizations, morphisms, cones, reduction), catalog (the named
indecomposables), homalg (truncated modules, stable Hom fingerprints,
Tor), triangles (verified exact triangles and their compositions),
classify (decomposition into catalog summands, punctured freeness,
thick classification), levels (level, obstruction and dimension
certificates), knorrer (the square-adding functors), cli (certificate
front end).
"""

__version__ = "0.1.0"
