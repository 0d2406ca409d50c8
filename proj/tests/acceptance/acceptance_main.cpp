// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Criteria are evaluated through the shared validation library so the CLI
// validate command exercises exactly the same code paths.

#include <cstdio>
#include <string>
#include <vector>

#include "sqjcm/validation.hpp"

using sqjcm::validation::CheckResult;
using sqjcm::validation::Options;
using sqjcm::validation::Report;
using sqjcm::validation::run_validation;

namespace {

struct Criterion {
  std::string label;
  std::vector<std::string> tokens;  // member checks, matched by substring
  std::string note;
};

bool report_criterion(const Report& rep, const Criterion& c) {
  bool pass = true;
  double worst_ratio = 0.0;
  std::string worst_name;
  double seconds = 0.0;
  int matched = 0;
  for (const auto& chk : rep.checks) {
    bool member = false;
    for (const auto& t : c.tokens)
      if (chk.name.find(t) != std::string::npos) member = true;
    if (!member) continue;
    ++matched;
    seconds += chk.seconds;
    pass = pass && chk.pass;
    double ratio = chk.tolerance > 0.0 ? chk.residual / chk.tolerance : chk.residual;
    if (!chk.pass || ratio >= worst_ratio) {
      worst_ratio = ratio;
      char detail[64];
      std::snprintf(detail, sizeof detail, " (residual %.3g, tol %.3g", chk.residual,
                    chk.tolerance);
      worst_name = chk.name + detail + (chk.note.empty() ? ")" : "; " + chk.note + ")");
    }
    if (!chk.pass) break;
  }
  if (matched == 0) {
    pass = false;
    worst_name = "no member checks ran";
  }
  std::printf("[%s] %s — worst: %s [%.1fs]%s\n", pass ? "PASS" : "FAIL", c.label.c_str(),
              worst_name.c_str(), seconds, c.note.empty() ? "" : ("  // " + c.note).c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  std::printf("acceptance suite: coefficient oracle, identities, route equivalence,\n"
              "recursion residual, revival phenomenology, long-time conjecture,\n"
              "mutation sensitivity\n\n");
  std::fflush(stdout);

  bool all = true;
  Report rep = run_validation(Options{});

  all &= report_criterion(
      rep, {"1. analytic-vs-oracle coefficients",
            {"bn_oracle_a10_b2_r0.1", "bn_oracle_a0_b5_r0.9", "bn_oracle_a15_b5_r0",
             "bn_oracle_a0_b1_r2.3"},
            ""});
  all &= report_criterion(rep, {"2. normalization", {"normalization_"}, ""});
  all &= report_criterion(rep, {"3. route equivalence", {"route_equivalence_"}, ""});
  all &= report_criterion(
      rep, {"4. operator identities",
            {"identity_reorder_squeeze_displace", "identity_compose_displacements",
             "identity_compose_scalar_unit_modulus", "ladder_residual",
             "commutator_interior", "bogoliubov_inverse", "conjugation_form"},
            ""});
  all &= report_criterion(rep, {"5. recursion residual and convergence order",
                                {"recursion_residual", "recursion_order"},
                                ""});
  all &= report_criterion(rep, {"6. revival phenomenology",
                                {"revival_peak_", "collapse_mean_b5"},
                                ""});
  all &= report_criterion(
      rep, {"7. long-time-average conjecture",
            {"longtime_conjecture_series", "ultrastrong_collapse"},
            "conjecture check: the stated long-time limit is a belief, not a theorem"});

  // 8. mutation sensitivity: corrupted construction must trip at least one check
  {
    Options flip;
    flip.quick = true;
    flip.defects.flip_sinh_sign = true;
    flip.filter = {"identity_reorder", "ladder_residual"};
    Report rflip = run_validation(flip);
    int failed_flip = 0;
    for (const auto& c : rflip.checks) failed_flip += c.pass ? 0 : 1;

    Options chi;
    chi.quick = true;
    chi.defects.drop_chi_phase = true;
    chi.filter = {"bn_oracle_phased"};
    Report rchi = run_validation(chi);
    int failed_chi = 0;
    for (const auto& c : rchi.checks) failed_chi += c.pass ? 0 : 1;

    bool pass = failed_flip >= 1 && failed_chi >= 1 && !rflip.checks.empty() &&
                !rchi.checks.empty();
    std::printf("[%s] 8. mutation sensitivity — flipped mixing sign tripped %d/%zu checks, "
                "dropped initial phase tripped %d/%zu checks\n",
                pass ? "PASS" : "FAIL", failed_flip, rflip.checks.size(), failed_chi,
                rchi.checks.size());
    all &= pass;
  }

  std::printf("\n%s\n", all ? "acceptance: ALL CRITERIA PASS" : "acceptance: FAILURES PRESENT");
  return all ? 0 : 1;
}
