"""
`kdvexp`'s public APIs.

Some specific APIs of interest:

* `kdvexp.spectral`: Fourier grids, fields, transforms and the Airy propagators
* `kdvexp.schemes`: The first- and second-order exponential-type steppers (`ExpInt1`, `ExpInt2`)
* `kdvexp.evolution`: Driving a stepper over an interval (`run_evolution`)
* `kdvexp.experiments`: Initial conditions, exact solitons and convergence studies
"""

__version__ = "0.1.0"
