#include "envcalc/sampling.hpp"

#include <algorithm>

namespace envcalc::oracle {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % bound;
}

std::int64_t SplitMix64::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  SplitMix64 g(seed ^ (label * 0xd1b54a32d192ed03ULL));
  g.next();
  return g.next();
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return derive_seed(seed, h);
}

const Interval& Box::at(sym::VarId v) const {
  auto it = overrides.find(v);
  return it == overrides.end() ? fallback : it->second;
}

SampleStream::SampleStream(std::uint64_t seed, Box box, std::vector<sym::VarId> vars)
    : rng_(seed), box_(std::move(box)), vars_(std::move(vars)) {}

std::map<sym::VarId, Rational> SampleStream::next_exact() {
  std::map<sym::VarId, Rational> p;
  for (sym::VarId v : vars_) {
    const Interval& iv = box_.at(v);
    const auto k = static_cast<long>(rng_.below(kResolution + 1));
    p.emplace(v, iv.lo + (iv.hi - iv.lo) * Rational(k, kResolution));
  }
  return p;
}

sym::Valuation SampleStream::next() { return sym::Valuation::from_rationals(next_exact()); }

std::vector<sym::VarId> collect_vars(std::span<const sym::Expr> exprs) {
  std::vector<sym::VarId> out;
  for (const auto& e : exprs) out.insert(out.end(), e.vars().begin(), e.vars().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace envcalc::oracle
