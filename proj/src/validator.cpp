#include "hypsearch/validator.hpp"

#include <cmath>
#include <optional>
#include <unordered_map>

#include "hypsearch/error.hpp"
#include "hypsearch/eval.hpp"
#include "hypsearch/featurize.hpp"
#include "hypsearch/parse.hpp"
#include "hypsearch/serialize.hpp"

namespace hypsearch {

const CheckResult* ValidationReport::find(std::string_view name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

constexpr const char* kCheckNames[8] = {
    "parse",         "kind-match",         "param-defaults", "variables",
    "finite-values", "finite-derivatives", "non-constant",   "regularizer-at-zero",
};

constexpr const char* kNotRun = "not run: blocked by an earlier failure";

}  // namespace

ValidationReport validate(const std::string& text, ComponentKind kind) {
  ValidationReport report;
  report.checks.resize(8);
  for (size_t i = 0; i < 8; ++i) report.checks[i].name = kCheckNames[i];
  for (CheckResult& c : report.checks) c.detail = kNotRun;

  auto pass = [&](size_t i, std::string detail = "ok") {
    report.checks[i].passed = true;
    report.checks[i].detail = std::move(detail);
  };
  auto fail = [&](size_t i, std::string detail) {
    report.checks[i].passed = false;
    report.checks[i].detail = std::move(detail);
  };

  // (1) parse — lenient: variable legality is check (4)'s job
  std::optional<HypothesisProgram> prog;
  try {
    prog = detail::parse_lenient(text);
    pass(0);
  } catch (const Error& e) {
    fail(0, e.what());
  }

  if (prog) {
    // (2) declared kind matches the requested slot
    if (prog->kind == kind) {
      pass(1);
    } else {
      fail(1, std::string(errc_name(Errc::KindMismatch)) + ": declared " +
                  std::string(kind_name(prog->kind)) + ", requested " +
                  std::string(kind_name(kind)));
    }

    // (3) parameter defaults are finite
    {
      bool ok = true;
      for (const ParamSpec& p : prog->params) {
        if (!std::isfinite(p.default_value)) {
          fail(2, "parameter '" + p.name + "' default is not finite");
          ok = false;
          break;
        }
      }
      if (ok) pass(2);
    }

    // (4) variables legal for the requested kind
    {
      bool ok = true;
      for (size_t i = 0; i < prog->expr.node_count() && ok; ++i) {
        const ExprNode& n = prog->expr.node(static_cast<int32_t>(i));
        if (n.kind == NodeKind::Variable && !is_variable_of(kind, n.symbol)) {
          fail(3, std::string(errc_name(Errc::IllegalVariable)) + ": '" + n.symbol +
                      "' is not legal for " + std::string(kind_name(kind)));
          ok = false;
        }
      }
      if (ok) pass(3);
    }

    // probe sweep shared by (5)-(8); compilation can fail when (3)/(4) did
    std::optional<CompiledProgram> cp;
    try {
      std::unordered_map<std::string, double> bindings;
      for (const auto& [name, value] : probe_bindings(kind)) bindings[name] = value;
      cp.emplace(*prog, std::string(probe_variable(kind)), bindings);
    } catch (const Error&) {
      cp.reset();
    }

    if (cp) {
      // (5) finite value at every probe point
      std::vector<double> values(kProbeCount);
      size_t bad_value = kProbeCount;
      for (size_t i = 0; i < kProbeCount; ++i) {
        values[i] = (*cp)(probe_point(i));
        if (bad_value == kProbeCount && !std::isfinite(values[i])) bad_value = i;
      }
      if (bad_value == kProbeCount) {
        pass(4);
      } else {
        fail(4, "non-finite value at " + std::string(probe_variable(kind)) + " = " +
                    format_double(probe_point(bad_value)));
      }

      // (6) finite derivative at every probe point
      size_t bad_deriv = kProbeCount;
      for (size_t i = 0; i < kProbeCount; ++i) {
        if (!std::isfinite(cp->dual(probe_point(i)).d)) {
          bad_deriv = i;
          break;
        }
      }
      if (bad_deriv == kProbeCount) {
        pass(5);
      } else {
        fail(5, "non-finite derivative at " + std::string(probe_variable(kind)) + " = " +
                    format_double(probe_point(bad_deriv)));
      }

      // (7) non-constant across the grid; constant regularizers are legal
      if (kind == ComponentKind::Regularizer) {
        pass(6, "not applicable to regularizers");
      } else {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (double v : values) {
          if (!std::isfinite(v)) continue;
          lo = v < lo ? v : lo;
          hi = v > hi ? v : hi;
        }
        if (hi - lo > 1e-9) {
          pass(6);
        } else {
          fail(6, "value varies by " + format_double(hi >= lo ? hi - lo : 0.0) +
                      " across the probe grid (needs > 1e-9)");
        }
      }

      // (8) regularizer penalty finite at w = 0
      if (kind != ComponentKind::Regularizer) {
        pass(7, "not applicable to " + std::string(kind_name(kind)) + "s");
      } else if (std::isfinite((*cp)(0.0))) {
        pass(7);
      } else {
        fail(7, "penalty is not finite at w = 0");
      }
    }
  }

  report.passed = true;
  for (const CheckResult& c : report.checks) report.passed = report.passed && c.passed;
  return report;
}

double validator_pass_rate(const std::vector<ValidationReport>& reports) {
  if (reports.empty()) throw Error(Errc::EmptyInput, "no validation reports");
  size_t n = 0;
  for (const ValidationReport& r : reports) n += r.passed ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(reports.size());
}

}  // namespace hypsearch
