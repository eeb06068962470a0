# -*- coding: utf-8 -*-
"""
  This script is used to validate the surgery engine against the bundled
  reference cases: the worked example and its surgery, the two-sphere Floer
  ranks, seeded curve identities and the cone comparison.

  A combined log is written to ./validation_results/ when flag_debug = 1.
"""
import os
from fractions import Fraction

import numpy as np

from Pyfloer import examples
from Pyfloer.ainfty import Cochain
from Pyfloer.cone import compare_cone_surgery
from Pyfloer.floer import hf_dimension
from Pyfloer.mc import MCCandidate, potential
from Pyfloer.novikov import max_abs_difference, monomial
from Pyfloer.surgery import (psi, psi_local_system_variant, resummation_check, transform_atlas,
                             verify_curve_identity)

tol = 1e-9
hit = 0
total = 0

# path to the folder where the resulting log files will be saved
out_dir = "./validation_results/"

# set to 1 if the csv log file needs to be produced (together with stdout)
flag_debug = 1

# number of seeded atlases for the curve identity
n_random = 50

# caps on meridian and longitude multiplicities
caps = (12, 12)

# begin code
try:
    os.makedirs(out_dir)
except OSError:
    if not os.path.isdir(out_dir):
        raise

if flag_debug == 1:
    fid_all = open(out_dir + "combined_results.csv", "w")
    fid_all.write("# %s, %s, %s, %s\n" % ("Case", "Reference", "Computed", "Deviation"))


def record(case, reference, computed, deviation):
    global hit, total
    total = total + 1
    if deviation < tol:
        hit = hit + 1
    else:
        print("Case %s: deviation %.3e exceeds tolerance" % (case, deviation))
    if flag_debug == 1:
        fid_all.write("%s, %s, %s, %.3e\n" % (case, reference, computed, deviation))


# worked example and its surgery
case = examples.worked_example()
W, flat = potential(case.algebra, case.candidate)
record("worked potential", "i q^1/2", W, max_abs_difference(W, monomial(1j, Fraction(1, 2))) + (0 if flat else 1))

b_eps, updates = psi_local_system_variant(case.candidate, case.surgery, "Lshift", example_mode=True)
surgered = case.surgered.with_changes(local_system={k: case.surgered.local_system[k] * v for k, v in updates.items()})
W, flat = potential(surgered, MCCandidate(b_eps, case.candidate.delta))
record("worked surgered potential", "i q^1/2", W, max_abs_difference(W, monomial(1j, Fraction(1, 2))) + (0 if flat else 1))

# Floer cohomology of two spheres before and after surgery
for n in (2, 3, 4):
    for flag, expected in ((False, 4), (True, 2)):
        dim, cert = hf_dimension(examples.classical_sphere_algebra(n, surgered=flag), Cochain())
        record("HF spheres n=%d surgered=%s" % (n, flag), expected, dim, abs(dim - expected))

# seeded curve identities
rng = np.random.default_rng(2024)
for k in range(n_random):
    rcase = examples.random_surgery_case(rng)
    A_eps = transform_atlas(rcase.algebra, rcase.surgery, caps, rcase.candidate)
    report = verify_curve_identity(rcase.algebra, A_eps, rcase.surgery, rcase.candidate)
    record("curve identity %d" % k, 0, report.max_difference(),
           max(0.0, report.max_difference() - report.tail_bound))
    for row in resummation_check(rcase.candidate, rcase.surgery, caps):
        record("resummation %d %s" % (k, row["kind"]), 0, row["difference"],
               max(0.0, row["difference"] - row["tail_bound"]))

# flat cases: potential and HF on both sides of the surgery
for k in range(5):
    fcase = examples.flat_surgery_case(k)
    A_eps = transform_atlas(fcase.algebra, fcase.surgery, caps, fcase.candidate)
    b_eps = psi(fcase.candidate, fcase.surgery)
    W0, flat0 = potential(fcase.algebra, fcase.candidate)
    W1, flat1 = potential(A_eps, MCCandidate(b_eps, fcase.candidate.delta))
    record("flat potential %d" % k, W0, W1, max_abs_difference(W0, W1) + (0 if flat0 and flat1 else 1))
    dim0, _ = hf_dimension(fcase.algebra, fcase.candidate.b, fcase.candidate.delta)
    dim1, _ = hf_dimension(A_eps, b_eps, fcase.candidate.delta)
    record("flat HF %d" % k, dim0, dim1, abs(dim0 - dim1))

# cone against surgery with trivial meridian coefficient
b = Cochain({"x": monomial(1, Fraction(-1, 2))})
report = compare_cone_surgery(examples.embedded_pair_cone(), "x", "xbar", Fraction(1, 2), b, caps)
record("cone discrepancy", 0, report["max_discrepancy"], report["max_discrepancy"])

if flag_debug == 1:
    fid_all.close()

print("Validation results: %d out of %d tests passed successfully.\n" % (hit, total))
if hit == total:
    print("The deviation between the reference and the computed value is smaller than %g.\n" % tol)
