"""Second-order total generalized variation of the normal field on triangle
meshes, with an ADMM mesh denoiser."""

__version__ = "0.1.0"
