#pragma once

#include <string>
#include <vector>

namespace coata {

struct CheckResult {
  enum class Status { pass, fail, skip };
  std::string name;
  Status status = Status::fail;
  std::string detail;  // measured margins, or the reason for a skip/fail
  double seconds = 0.0;
};

/// The oracle-backed property checks behind `selftest` and the acceptance
/// binary. Each is self-contained, uses fixed seeds, and reports the margin
/// it measured.
namespace checks {

/// Push PPR vs dense reference on 50 random bipartite graphs.
CheckResult push_ppr_oracle();
/// Propagation error shrinks geometrically and lands on the dense solve.
CheckResult tea_convergence();
/// Reachability lower-bound certificates never exceed the true score.
CheckResult lower_bound_fuzz();
/// Analytic backward vs central finite differences, per loss and combined.
CheckResult gradient_fd();
/// Descending the alignment loss alone aligns prototype pairs with margin.
CheckResult prototype_alignment();
/// Homophily recursion equals its closed form.
CheckResult homophily_closed_form();
/// Full pipeline beats its own ablations on a noisy synthetic benchmark.
CheckResult sbm_ablation();
/// Zeroed auxiliary losses reproduce a standalone GCN run exactly.
CheckResult plain_gcn_equivalence();
/// Optional end-to-end accuracy band on pre-converted Cora files.
CheckResult cora_band();

/// Extra desk-scale invariants run by `selftest` on top of the main list.
CheckResult reconstruction_invariants();
CheckResult normalization_bounds();

}  // namespace checks

/// The nine headline checks, in their canonical order.
std::vector<CheckResult> run_acceptance_suite();

/// Acceptance suite plus the extra invariants.
std::vector<CheckResult> run_selftest_suite();

/// "PASS name  detail" lines; returns false when any check failed.
bool print_check_report(const std::vector<CheckResult>& results);

}  // namespace coata
