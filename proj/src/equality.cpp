#include "envcalc/equality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "envcalc/eval.hpp"

namespace envcalc::sym {

void OracleConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("oracle needs at least one sample");
  if (!(tolerance > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::NotEqual: return "not-equal";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

namespace {

double scaled_difference(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

struct SampleRun {
  std::size_t finite = 0;
  double residual = 0.0;
  bool separated = false;
};

SampleRun run_samples(const Expr& a, const Expr& b, const OracleConfig& cfg, bool stop_on_separation) {
  const Expr both[] = {a, b};
  oracle::SampleStream stream(cfg.seed, cfg.domain, oracle::collect_vars(both));
  SampleRun run;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const Valuation p = stream.next();
      const double va = eval(a, p);
      const double vb = eval(b, p);
      if (!std::isfinite(va) || !std::isfinite(vb)) continue;
      const double r = scaled_difference(va, vb);
      ++run.finite;
      run.residual = std::max(run.residual, r);
      if (r > cfg.tolerance) run.separated = true;
      break;
    }
    if (run.separated && stop_on_separation) break;
  }
  return run;
}

}  // namespace

EqualityResult equal(const Expr& a, const Expr& b, const OracleConfig& cfg) {
  cfg.validate();
  const Expr na = normalize(a);
  const Expr nb = normalize(b);
  if (na == nb || normalize(na - nb).is_zero()) {
    return {Verdict::Equal, true, 0, 0.0};
  }
  const SampleRun run = run_samples(na, nb, cfg, true);
  EqualityResult out;
  out.samples = run.finite;
  out.residual = run.residual;
  out.verdict = run.separated ? Verdict::NotEqual : Verdict::Undetermined;
  return out;
}

EqualityResult combine(std::span<const EqualityResult> parts) {
  EqualityResult out{Verdict::Equal, true, 0, 0.0};
  for (const auto& p : parts) {
    out.samples += p.samples;
    out.residual = std::max(out.residual, p.residual);
    out.symbolic = out.symbolic && p.symbolic;
    if (p.verdict == Verdict::NotEqual) {
      out.verdict = Verdict::NotEqual;
    } else if (p.verdict == Verdict::Undetermined && out.verdict == Verdict::Equal) {
      out.verdict = Verdict::Undetermined;
    }
  }
  return out;
}

double sampled_residual(const Expr& a, const Expr& b, const OracleConfig& cfg) {
  return run_samples(a, b, cfg, false).residual;
}

}  // namespace envcalc::sym
