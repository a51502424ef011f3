"""Simulator for semi-quantum direct communication with probe-based
attack detection.

The package models a sender (Alice) who transmits a classical message
through shared entangled pairs to a receiver (Bob) who can only measure
or reflect qubits.  Randomly interleaved probing qubits let Alice detect
a measure-and-replay eavesdropper, either by aborting on the first
inconsistent probe (strict mode, noiseless channel) or by testing the
probe mismatch rate against the channel's known or estimated disturbance
rate (tolerant mode, one-sided z-test).

Modules:

- ``qstate``      closed symbolic algebra of Bell and product states
- ``actors``      one quantum round trip: send, transit, handle, measure
- ``protocol``    detection rounds, single-bit transfer, full sessions
- ``stats``       estimators, z-tests, quantiles, confidence intervals
- ``oracle``      exact enumerations backing the statistical tests
- ``experiments`` Monte Carlo sweeps and CSV emission
- ``wire``        newline-JSON message codec for the two-process mode
- ``netsession``  socket transport running one session across processes
- ``cli``         command-line entry point
"""

__version__ = "0.1.0"
