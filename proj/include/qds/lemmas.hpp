#pragma once
#include <vector>

#include "qds/check.hpp"
#include "qds/forms.hpp"

namespace qds {

enum class WitnessFamily { MatrixZeta, CircleOmega };

// explicit zeta_n / omega_n; asserts pi(witness) = 0 and records pi(d witness)
Check witness_suite(WitnessFamily fam, int n, int cutoff);
FormExpr matrix_zeta(const FormContext& c, int n);
// xi, eta are Laurent spanning indices with xi*eta = 1 modulo compacts
FormExpr circle_omega(int n, int xi, int eta, int xi2, int eta2);

std::vector<Check> verify_s_calculus(int cutoff, int max_budget);
std::vector<Check> verify_laurent(int cutoff);
std::vector<Check> verify_circle(int window, int gen_degree, int budget);
std::vector<Check> verify_decomposition(const TriplePtr& base, int n, int cutoff, int budget, Mode mode);
std::vector<Check> verify_qds_theorem(const TriplePtr& base, int cutoff, int budget, Mode mode);
std::vector<Check> verify_corollary(int cutoff1, int cutoff2);
std::vector<Check> verify_pauli(int window, int gen_degree, int budget);
std::vector<Check> verify_conditions(int window, int cutoff);

}  // namespace qds
