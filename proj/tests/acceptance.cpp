// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdasym/cli/scenarios.hpp"

using namespace cdasym;
using namespace cdasym::cli;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void add(bool ok, const std::string& line) {
    pass = pass && ok;
    lines.push_back((ok ? "    ok   " : "    FAIL ") + line);
  }
};

struct Suite {
  std::map<std::string, std::optional<ScenarioResult>> results;
  std::map<std::string, std::string> errors;

  const ScenarioResult* get(const std::string& name) {
    if (!results.count(name)) {
      auto start = std::chrono::steady_clock::now();
      try {
        results[name] = run_scenario(name, {});
      } catch (const std::exception& e) {
        results[name] = std::nullopt;
        errors[name] = e.what();
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("  [%s ran in %.1f s]\n", name.c_str(), secs);
    }
    return results[name] ? &*results[name] : nullptr;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string describe(const Check& c) { return c.name + ": " + fmt(c.value) + " " + c.relation + " " + fmt(c.limit); }

std::string describe(const diagnostics::DecayReport& d) {
  return d.quantity + (d.p.empty() ? "" : " p=" + d.p) + ": slope " + fmt(d.fitted_slope) + " target " +
         fmt(d.target_slope) + " +/- " + fmt(d.tolerance * 100.0) + "%";
}

// Checks whose name starts with any of `prefixes`; at least one must exist.
void checks_with_prefix(Outcome& o, const ScenarioResult& r, std::initializer_list<std::string> prefixes) {
  std::size_t found = 0;
  for (const auto& c : r.checks) {
    for (const auto& p : prefixes) {
      if (c.name.rfind(p, 0) == 0) {
        o.add(c.pass, r.scenario + " " + describe(c));
        ++found;
        break;
      }
    }
  }
  if (found == 0) o.add(false, r.scenario + ": no checks matching the expected names");
}

void reports_matching(Outcome& o, const ScenarioResult& r, const std::string& quantity_prefix) {
  std::size_t found = 0;
  for (const auto& d : r.reports) {
    if (d.quantity.rfind(quantity_prefix, 0) == 0) {
      o.add(d.pass, r.scenario + " " + describe(d));
      ++found;
    }
  }
  if (found == 0) o.add(false, r.scenario + ": no fit for " + quantity_prefix);
}

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> scenarios;
  std::function<void(Outcome&, const std::map<std::string, const ScenarioResult*>&)> evaluate;
};

}  // namespace

int main() {
  const std::vector<std::string> all{"heat-asymptotics",      "similarity-spectral", "linear-convection",
                                     "burgers-hopfcole",      "decay-suite",         "contraction-suite",
                                     "self-similar-critical", "weak-nonlinear",      "nwave-strong"};

  std::vector<Criterion> criteria{
      {1, "heat oracle: order in [1.8, 2.2], sup error < 1e-5 at n = 4096", {"heat-asymptotics"},
       [](Outcome& o, const auto& s) { checks_with_prefix(o, *s.at("heat-asymptotics"), {"oracle/"}); }},
      {2, "mixed-sign data: scaled distance to MG strictly decreasing, ratio < 0.15", {"heat-asymptotics"},
       [](Outcome& o, const auto& s) { checks_with_prefix(o, *s.at("heat-asymptotics"), {"mixed_sign/"}); }},
      {3, "zero-mass data: sup slope -1 +/- 10%", {"heat-asymptotics"},
       [](Outcome& o, const auto& s) { reports_matching(o, *s.at("heat-asymptotics"), "||G(t) * u0||_inf"); }},
      {4, "Burgers vs Hopf-Cole: L1 < 1e-4 at t = 1, < 1e-3 at t = 10", {"burgers-hopfcole"},
       [](Outcome& o, const auto& s) { checks_with_prefix(o, *s.at("burgers-hopfcole"), {"oracle/"}); }},
      {5, "critical q = 2: scaled distance to u_M decreasing on [1, 100], final p1 < 1e-2", {"self-similar-critical"},
       [](Outcome& o, const auto& s) { checks_with_prefix(o, *s.at("self-similar-critical"), {"attractor/"}); }},
      {6, "spectral: residuals < 1e-4, zero-mass rate 0.5 +/- 10%, agreement < 1e-5 at s = 5", {"similarity-spectral"},
       [](Outcome& o, const auto& s) {
         const auto& r = *s.at("similarity-spectral");
         checks_with_prefix(o, r, {"eigen_residual/", "spectral_vs_solver/l1_s5"});
         reports_matching(o, r, "||v(s)||_K");
       }},
      {7, "q in {2, 3}: sup slope -0.5 +/- 10%, L1 non-increasing", {"decay-suite", "burgers-hopfcole"},
       [](Outcome& o, const auto& s) {
         const auto& r = *s.at("decay-suite");
         std::size_t found = 0;
         for (const auto& d : r.reports) {
           if (d.quantity == "||u(t)||_p" && d.p == "inf") {
             o.add(d.pass, r.scenario + " " + describe(d));
             ++found;
           }
         }
         if (found != 2) o.add(false, "expected one sup fit per q, found " + std::to_string(found));
         checks_with_prefix(o, r, {"q2/l1_non_increasing", "q3/l1_non_increasing"});
         checks_with_prefix(o, *s.at("burgers-hopfcole"), {"l1_not_increased"});
       }},
      {8, "q = 2: gradient sup slope -1 +/- 15%", {"decay-suite"},
       [](Outcome& o, const auto& s) { reports_matching(o, *s.at("decay-suite"), "||u_x(t)||_inf"); }},
      {9, "L1 contraction: three pairs non-increasing, equal-mass pair strict over 10 steps", {"contraction-suite"},
       [](Outcome& o, const auto& s) {
         checks_with_prefix(o, *s.at("contraction-suite"), {"ordered/", "mixed/", "equal_mass/"});
       }},
      {10, "similarity steady state within 1e-4 of f_M by s = 25; positivity and order in M", {"self-similar-critical"},
       [](Outcome& o, const auto& s) {
         checks_with_prefix(o, *s.at("self-similar-critical"), {"steady_state/", "profiles/"});
       }},
      {11, "q in {2.5, 3, 4}: three-case weak rates", {"weak-nonlinear"},
       [](Outcome& o, const auto& s) { reports_matching(o, *s.at("weak-nonlinear"), "scaled distance to M G"); }},
      {12, "q = 1.5: sup slope, entropy monitor, sup bound, N-wave distance ratio < 0.3", {"nwave-strong"},
       [](Outcome& o, const auto& s) {
         const auto& r = *s.at("nwave-strong");
         reports_matching(o, r, "||u(t)||_inf");
         checks_with_prefix(o, r, {"entropy/", "sup_bound/", "attractor/"});
       }},
      {13, "mass drift <= 1e-8 (1 + |M|) in every run", all,
       [&all](Outcome& o, const auto& s) {
         for (const auto& name : all) {
           const auto& r = *s.at(name);
           bool any = false;
           for (const auto& c : r.checks) any = any || c.name.rfind("mass_drift/", 0) == 0;
           if (any) checks_with_prefix(o, r, {"mass_drift/"});
         }
       }},
  };

  Suite suite;
  int failed = 0;
  std::vector<std::string> summary;
  for (const auto& c : criteria) {
    std::printf("criterion %d: %s\n", c.id, c.title.c_str());
    Outcome o;
    std::map<std::string, const ScenarioResult*> inputs;
    for (const auto& name : c.scenarios) {
      const ScenarioResult* r = suite.get(name);
      if (!r) {
        o.add(false, name + " raised: " + suite.errors[name]);
      } else {
        inputs[name] = r;
      }
    }
    if (inputs.size() == c.scenarios.size()) c.evaluate(o, inputs);
    for (const auto& line : o.lines) std::printf("%s\n", line.c_str());
    const std::string verdict = std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + ": " + c.title;
    std::printf("%s\n\n", verdict.c_str());
    summary.push_back(verdict);
    if (!o.pass) ++failed;
  }

  std::printf("summary\n");
  for (const auto& line : summary) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
