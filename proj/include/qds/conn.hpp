#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qds/check.hpp"
#include "qds/forms.hpp"

namespace qds {

// forms of one algebra at one truncation, with Omega^1 and Omega^2 computed once
struct Calculus {
  std::shared_ptr<FormContext> ctx;
  OmegaSpace o1, o2;
  const Layer& layer() const { return ctx->layer(); }
};
using CalcPtr = std::shared_ptr<const Calculus>;
CalcPtr make_calculus(const TriplePtr& t, int budget, Mode mode, bool parallel = true);

struct FgpModule {
  CalcPtr calc;
  int n = 0;
  std::vector<Op> p;  // row-major n x n
  std::string tag;    // identity used for ModuleMismatch
  const Op& at(int i, int j) const { return p[i * n + j]; }
};

// throws NotAProjection with the residual of p^2 - p or p* - p
FgpModule make_module(const CalcPtr& calc, int n, const std::vector<Op>& p);

struct ModElem {
  std::string tag;
  std::vector<Op> v;
};
ModElem module_element(const FgpModule& m, const std::vector<Op>& a);  // p (a_1, ..., a_n)
ModElem column(const FgpModule& m, int j);                               // p e_j
ModElem mul_right(const FgpModule& m, const ModElem& x, const Op& a);
Op hermitian_inner(const FgpModule& m, const ModElem& x, const ModElem& y);  // sum x_j^* y_j

// elements of E (x) Omega^k in the free presentation: n universal forms
using FormVec = std::vector<FormExpr>;
// classes of the components in Omega^k (k = 1, 2)
std::vector<std::vector<Scalar>> classes(const FgpModule& m, const FormVec& w);
std::vector<std::vector<Scalar>> op_classes(const FgpModule& m, int degree, const std::vector<Op>& w);

struct ConnectionData {
  FgpModule module;
  std::vector<std::vector<Scalar>> perturbation;  // n*n Omega^1 classes; all zero = Grassmannian
  bool is_grassmannian() const;
};

ConnectionData grassmannian(const FgpModule& m);
// A = pBp + (pBp)^*, compatible with the canonical Hermitian structure; B entries lie in pi(Omega^1)
ConnectionData perturbed(const FgpModule& m, const std::vector<Op>& B);
FormVec apply_connection(const ConnectionData& c, const ModElem& x);
// curvature matrix: entry (i, j) is the Omega^2 class of (Theta(p e_j))_i
std::vector<std::vector<Scalar>> curvature(const ConnectionData& c);
std::vector<std::vector<Scalar>> curvature_on(const ConnectionData& c, const ModElem& x);
std::vector<Op> curvature_ops(const ConnectionData& c);  // pi of the universal curvature on columns, before the quotient
// p dp dp evaluated independently through universal products
std::vector<std::vector<Scalar>> grassmannian_curvature_formula(const FgpModule& m);

struct LiftedModule {
  FgpModule base;
  FgpModule lifted;  // (p (x) u) over the suspension
  int cutoff = 0;
};
LiftedModule lift_module(const FgpModule& m, int cutoff, int budget, Mode mode, bool parallel = true);
// Psi: (p (x) u)(A (x) S)^n -> p A^n (x) uS, keyed by the column s of u e_0s
std::map<int, std::vector<Op>> Psi(const LiftedModule& lm, const ModElem& x);
ModElem Phi(const LiftedModule& lm, const std::map<int, std::vector<Op>>& parts);

ConnectionData lift_connection(const ConnectionData& c, const LiftedModule& lm);
// operator-level evaluation of the extended-connection formula on x
std::vector<Op> lifted_formula(const ConnectionData& c, const LiftedModule& lm, const ModElem& x);
std::vector<std::vector<Scalar>> psi_map(const LiftedModule& lm, const std::vector<std::vector<Scalar>>& theta);

// axioms on sample data; return the number of failures
int leibniz_failures(const ConnectionData& c, const std::vector<ModElem>& xs, const std::vector<Op>& as);
int compatibility_failures(const ConnectionData& c, const std::vector<ModElem>& xs);
int linearity_failures(const ConnectionData& c, const std::vector<ModElem>& xs, const std::vector<Op>& as);

Check verify_diagram(const std::string& id, const ConnectionData& c, const LiftedModule& lm);
json connection_json(const ConnectionData& c);
json class_matrix_json(const std::vector<std::vector<Scalar>>& m, int n);

// test projections
std::vector<Op> bott_projection(const Layer& circle);            // 2 x 2 over a circle layer
std::vector<Op> u_diagonal_projection(const Layer& toeplitz);   // diag(u, 1) over a QDS layer

}  // namespace qds
