#include "envcalc/modules.hpp"

#include <algorithm>
#include <cmath>

#include "envcalc/numeric.hpp"

namespace envcalc {

using sym::Expr;

EnvModule smoothen(const AModule& p) {
  std::vector<std::vector<EnvelopeElement>> rels;
  for (const auto& r : p.relations()) {
    std::vector<EnvelopeElement> row;
    for (const auto& a : r) row.push_back(embed_A(a));
    rels.push_back(std::move(row));
  }
  return EnvModule(p.gens(), std::move(rels));
}

EnvVector base_change(const AVector& v) {
  EnvVector out;
  for (const auto& a : v.coeffs) out.coeffs.push_back(embed_A(a));
  return out;
}

EnvVector tensor_normalize(const TensorElement& t, std::size_t gens) {
  std::vector<std::vector<EnvelopeElement>> parts(gens);
  for (const auto& s : t.summands) {
    if (s.vector.coeffs.size() != gens) throw std::invalid_argument("tensor summand has the wrong length");
    for (std::size_t j = 0; j < gens; ++j) parts[j].push_back(env_mul(s.scalar, embed_A(s.vector.coeffs[j])));
  }
  EnvVector out;
  for (auto& p : parts) out.coeffs.push_back(env_sum(p));
  return out;
}

AVector scale(const AElement& a, const AVector& v) {
  AVector out;
  for (const auto& c : v.coeffs) out.coeffs.push_back(a * c);
  return out;
}

EnvVector scale(const EnvelopeElement& a, const EnvVector& v) {
  EnvVector out;
  for (const auto& c : v.coeffs) out.coeffs.push_back(env_mul(a, c));
  return out;
}

EnvVector add(const EnvVector& a, const EnvVector& b) {
  if (a.coeffs.size() != b.coeffs.size()) throw std::invalid_argument("vector length mismatch");
  EnvVector out;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs.push_back(env_add(a.coeffs[i], b.coeffs[i]));
  return out;
}

sym::EqualityResult equal_mod_flats(const std::vector<std::vector<Expr>>& relations, const std::vector<Expr>& a,
                                    const std::vector<Expr>& b, const sym::OracleConfig& cfg) {
  cfg.validate();
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  const std::size_t p = a.size();
  std::vector<Expr> d(p);
  for (std::size_t j = 0; j < p; ++j) d[j] = sym::normalize(a[j] - b[j]);
  std::vector<std::vector<Expr>> rels;
  for (const auto& r : relations) {
    std::vector<Expr> row;
    for (const auto& e : r) row.push_back(sym::normalize(e));
    rels.push_back(std::move(row));
  }

  // Eliminate columns that have a constant pivot in some relation.
  std::vector<bool> used(rels.size(), false);
  auto reduce = [](std::vector<Expr>& x, const std::vector<Expr>& pivot_row, std::size_t col) {
    if (x[col].is_zero()) return;
    const Expr factor = x[col] / pivot_row[col];
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = sym::normalize(x[k] - factor * pivot_row[k]);
  };
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = rels.size();
    for (std::size_t r = 0; r < rels.size() && pivot == rels.size(); ++r) {
      if (!used[r] && rels[r][col].is_const() && !rels[r][col].is_zero()) pivot = r;
    }
    if (pivot == rels.size()) continue;
    used[pivot] = true;
    for (std::size_t r = 0; r < rels.size(); ++r) {
      if (r != pivot && !used[r]) reduce(rels[r], rels[pivot], col);
    }
    reduce(d, rels[pivot], col);
  }

  if (std::all_of(d.begin(), d.end(), [](const Expr& e) { return e.is_zero(); })) {
    return {sym::Verdict::Equal, true, 0, 0.0};
  }
  std::vector<sym::EqualityResult> parts;
  for (const auto& e : d) parts.push_back(sym::equal(e, Expr(0), cfg));
  const auto entrywise = sym::combine(parts);

  std::vector<std::vector<Expr>> rest;
  for (std::size_t r = 0; r < rels.size(); ++r) {
    if (used[r]) continue;
    if (std::any_of(rels[r].begin(), rels[r].end(), [](const Expr& e) { return !e.is_zero(); })) {
      rest.push_back(rels[r]);
    }
  }
  if (rest.empty() || entrywise.holds()) return entrywise;

  // A difference that survives elimination may still lie in the span of the
  // remaining relations. Points where it leaves that span separate.
  std::vector<Expr> all = d;
  for (const auto& r : rest) all.insert(all.end(), r.begin(), r.end());
  oracle::SampleStream stream(cfg.seed, cfg.domain, oracle::collect_vars(all));
  sym::EqualityResult out{sym::Verdict::Undetermined, false, 0, entrywise.residual};
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const auto pt = stream.next();
      std::vector<std::vector<double>> rows;
      bool finite = true;
      for (const auto& r : rest) {
        std::vector<double> row;
        for (const auto& e : r) {
          row.push_back(sym::eval(e, pt));
          finite = finite && std::isfinite(row.back());
        }
        rows.push_back(std::move(row));
      }
      std::vector<double> dv;
      for (const auto& e : d) {
        dv.push_back(sym::eval(e, pt));
        finite = finite && std::isfinite(dv.back());
      }
      if (!finite) continue;
      ++out.samples;
      const auto r0 = oracle::rank_at(rows);
      rows.push_back(dv);
      if (oracle::rank_at(rows) > r0) {
        out.verdict = sym::Verdict::NotEqual;
        return out;
      }
      break;
    }
  }
  return out;
}

template <class Scalar>
std::size_t fiber_dimension(const FinPresModule<Scalar>& p, const sym::Valuation& at) {
  if (p.relations().empty()) return p.gens();
  std::vector<std::vector<double>> rows;
  for (const auto& r : p.relations()) {
    std::vector<double> row;
    for (const auto& s : r) row.push_back(s.evaluate(at));
    rows.push_back(std::move(row));
  }
  return p.gens() - oracle::rank_at(std::move(rows));
}

template std::size_t fiber_dimension(const AModule&, const sym::Valuation&);
template std::size_t fiber_dimension(const EnvModule&, const sym::Valuation&);

void require_group(const AModule& p, sym::Group g, const char* what) {
  for (const auto& r : p.relations()) {
    for (const auto& a : r) {
      if (!a.flatten().only_group(g)) {
        throw GroupError(std::string(what) + " relation entry uses the wrong variables: " +
                         sym::to_string(a.flatten()));
      }
    }
  }
}

EnvModule smoothened_tensor(const AModule& p, const AModule& q) {
  require_group(p, sym::Group::X, "left factor");
  require_group(q, sym::Group::Y, "right factor");
  const std::size_t pg = p.gens();
  const std::size_t qg = q.gens();
  std::vector<std::vector<EnvelopeElement>> rels;
  for (const auto& r : p.relations()) {
    for (std::size_t j = 0; j < qg; ++j) {
      std::vector<EnvelopeElement> row(pg * qg, embed_A(AElement()));
      for (std::size_t i = 0; i < pg; ++i) row[i * qg + j] = embed_A(r[i]);
      rels.push_back(std::move(row));
    }
  }
  for (const auto& s : q.relations()) {
    for (std::size_t i = 0; i < pg; ++i) {
      std::vector<EnvelopeElement> row(pg * qg, embed_A(AElement()));
      for (std::size_t j = 0; j < qg; ++j) row[i * qg + j] = embed_A(s[j]);
      rels.push_back(std::move(row));
    }
  }
  return EnvModule(pg * qg, std::move(rels));
}

// --- product isomorphism ------------------------------------------------------

namespace {

void require_y_vector(const AVector& q) {
  for (const auto& a : q.coeffs) {
    if (!a.flatten().only_group(sym::Group::Y)) {
      throw GroupError("coefficients of a C(N)-module element must use y only: " + sym::to_string(a.flatten()));
    }
  }
}

AVector mirror(const AVector& v) {
  AVector out;
  for (const auto& a : v.coeffs) out.coeffs.push_back(envcalc::mirror(a));
  return out;
}

}  // namespace

ProductTarget product_forward(const ProductSource& s) {
  ProductTarget out;
  for (const auto& term : s.summands) {
    if (!term.f.only_group(sym::Group::X)) {
      throw GroupError("C(M) factor must use x only: " + sym::to_string(term.f));
    }
    require_y_vector(term.q);
    out.summands.push_back({env_mul(term.scalar, embed_A(AElement::from_x(term.f))), term.q});
  }
  return out;
}

ProductSource product_backward(const ProductTarget& t) {
  ProductSource out;
  for (const auto& term : t.summands) {
    require_y_vector(term.q);
    out.summands.push_back({term.scalar, Expr(1), term.q});
  }
  return out;
}

ProductSource scale(const EnvelopeElement& a, const ProductSource& s) {
  ProductSource out;
  for (const auto& term : s.summands) out.summands.push_back({env_mul(a, term.scalar), term.f, term.q});
  return out;
}

ProductTarget scale(const EnvelopeElement& a, const ProductTarget& t) {
  ProductTarget out;
  for (const auto& term : t.summands) out.summands.push_back({env_mul(a, term.scalar), term.q});
  return out;
}

EnvVector normalize_source(const ProductSource& s, std::size_t gens) {
  // f (x) q is the A-vector f * q of C(M) (x) Q.
  TensorElement t;
  for (const auto& term : s.summands) {
    const auto f = AElement::try_from_expr(term.f);
    if (!f) throw GroupError("factor must use a single variable group: " + sym::to_string(term.f));
    t.summands.push_back({term.scalar, scale(*f, term.q)});
  }
  return tensor_normalize(t, gens);
}

EnvVector normalize_target(const ProductTarget& t, std::size_t gens) {
  TensorElement out;
  for (const auto& term : t.summands) out.summands.push_back({term.scalar, term.q});
  return tensor_normalize(out, gens);
}

ProductSource mirror(const ProductSource& s) {
  ProductSource out;
  for (const auto& term : s.summands) {
    out.summands.push_back({envcalc::mirror(term.scalar), envcalc::mirror(term.f), mirror(term.q)});
  }
  return out;
}

ProductTarget mirror(const ProductTarget& t) {
  ProductTarget out;
  for (const auto& term : t.summands) out.summands.push_back({envcalc::mirror(term.scalar), mirror(term.q)});
  return out;
}

AModule mirror(const AModule& p) {
  std::vector<std::vector<AElement>> rels;
  for (const auto& r : p.relations()) {
    std::vector<AElement> row;
    for (const auto& a : r) row.push_back(envcalc::mirror(a));
    rels.push_back(std::move(row));
  }
  return AModule(p.gens(), std::move(rels));
}

ProductTarget product_forward_mirrored(const ProductSource& s) { return mirror(product_forward(mirror(s))); }

ProductSource product_backward_mirrored(const ProductTarget& t) { return mirror(product_backward(mirror(t))); }

}  // namespace envcalc
