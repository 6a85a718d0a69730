"""quenchfront: invasion fronts of the Allen-Cahn equation behind a slowly
varying quenching ramp mu(x - ct) = -tanh(eps (x - ct)).

Subpackages cover the special-function kernels, generic BVP/ODE numerics,
the traveling-wave and stationary front boundary-value problems, the
Painleve-II (Hastings-McLeod) connection problem, the slow-passage fold
delay, front-linearization spectra, and a method-of-lines PDE simulator.
"""

__version__ = "0.1.0"
