#include "frontlp/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "frontlp/util.hpp"

namespace frontlp {

FrontierLP build_lp(const SampleSet& s, const KernelSpec& k,
                    const Bandwidth& h, const LpConstants& consts)
{
  if (s.n < 1) throw std::invalid_argument("build_lp needs n >= 1");
  if (!(h.h > 0.0 && h.h < 0.5))
    throw std::invalid_argument("build_lp needs 0 < h < 1/2");

  FrontierLP lp;
  lp.n_vars = s.n;
  lp.xs = s.xs;
  lp.ys = s.ys;
  lp.bandwidth = h;
  lp.kernel = k;

  const int n = s.n;
  const double hh = h.h;
  lp.meta.h = hh;
  lp.meta.c_alpha = consts.c_alpha;
  lp.meta.c_alpha_warning = consts.c_alpha < 8.0 * consts.f_max - 1e-12;
  lp.meta.m_h = int(std::floor(1.0 / hh));
  lp.curvature_rhs = n >= 2 ? 2.0 * consts.l_beta * k.sup_constants().K2_max *
                                  std::log(double(n)) / (n * hh * hh * hh)
                            : 0.0;
  lp.meta.second_deriv_bound = lp.curvature_rhs;
  lp.meta.curvature_bound_warning = lp.curvature_rhs > 1e12;
  lp.bin_rhs = consts.c_alpha * hh;

  lp.cover.resize(n);
  lp.curvature.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& grp = lp.cover[i];
    grp.i = i + 1;
    const double xi = s.xs[i];
    for (int kk = 0; kk < n; ++kk) {
      // Signed periodic offset with |d| <= h; unique for h < 1/2.
      const double d0 = s.xs[kk] - xi;
      double d = d0;
      int shift = 0;
      if (std::abs(d0 - 1.0) < std::abs(d)) {
        d = d0 - 1.0;
        shift = -1;
      }
      if (std::abs(d0 + 1.0) < std::abs(d)) {
        d = d0 + 1.0;
        shift = +1;
      }
      if (std::abs(d) > hh) continue;
      const double u = k.eval_periodic(h, xi, s.xs[kk], 0);
      const double v = k.eval_periodic(h, xi, s.xs[kk], 1);
      const double w = k.eval_periodic(h, xi, s.xs[kk], 2);
      if (u != 0.0) grp.u.emplace_back(kk, u);
      if (v != 0.0) grp.v.emplace_back(kk, v);
      if (w != 0.0) lp.curvature[i].emplace_back(kk, w);
      grp.points.push_back({kk + 1 + shift * n, d, s.ys[kk]});
    }
    std::sort(grp.points.begin(), grp.points.end(),
              [](const CoverGroup::Point& a, const CoverGroup::Point& b) {
                return a.j < b.j;
              });
    lp.meta.n_cover_rows += grp.points.size();
  }
  lp.meta.n_curvature_rows = std::size_t(2) * n;

  lp.bins.resize(lp.meta.m_h);
  for (int i = 0; i < n; ++i) {
    int m = int(std::floor(s.xs[i] * lp.meta.m_h));
    if (m >= lp.meta.m_h) m = lp.meta.m_h - 1;  // X = 1 goes to the last bin
    lp.bins[m].push_back(i);
  }
  lp.meta.n_bin_rows = lp.bins.size();
  return lp;
}

namespace {

SparseVec combine(const SparseVec& u, const SparseVec& v, double d)
{
  std::map<int, double> acc;
  for (const auto& [k, val] : u) acc[k] += val;
  for (const auto& [k, val] : v) acc[k] += d * val;
  SparseVec out;
  out.reserve(acc.size());
  for (const auto& [k, val] : acc) out.emplace_back(k, val);
  return out;
}

double dot(const SparseVec& a, const std::vector<double>& x)
{
  double acc = 0.0;
  for (const auto& [k, v] : a) acc += v * x[k];
  return acc;
}

}  // namespace

std::vector<ConstraintRow> FrontierLP::rows() const
{
  std::vector<ConstraintRow> out;
  out.reserve(n_rows());
  for (const auto& grp : cover) {
    for (const auto& p : grp.points) {
      ConstraintRow r;
      r.kind = RowKind::cover;
      r.i = grp.i;
      r.j = p.j;
      r.sense = RowSense::ge;
      r.rhs = p.rhs;
      r.entries = combine(grp.u, grp.v, p.d);
      out.push_back(std::move(r));
    }
  }
  for (int sign = 0; sign < 2; ++sign) {
    for (int i = 0; i < n_vars; ++i) {
      ConstraintRow r;
      r.kind = sign == 0 ? RowKind::curvature_plus : RowKind::curvature_minus;
      r.i = i + 1;
      r.sense = RowSense::le;
      r.rhs = curvature_rhs;
      r.entries = curvature[i];
      if (sign == 1)
        for (auto& e : r.entries) e.second = -e.second;
      out.push_back(std::move(r));
    }
  }
  for (std::size_t m = 0; m < bins.size(); ++m) {
    ConstraintRow r;
    r.kind = RowKind::bin_mass;
    r.i = int(m) + 1;
    r.sense = RowSense::le;
    r.rhs = bin_rhs;
    for (int idx : bins[m]) r.entries.emplace_back(idx, 1.0);
    out.push_back(std::move(r));
  }
  return out;
}

FeasibilityReport validate_solution(const FrontierLP& lp,
                                    const std::vector<double>& alpha,
                                    double tol)
{
  if (int(alpha.size()) != lp.n_vars)
    throw std::invalid_argument("alpha length does not match n_vars");
  FeasibilityReport rep;
  for (const auto& grp : lp.cover) {
    const double su = dot(grp.u, alpha);
    const double sv = dot(grp.v, alpha);
    for (const auto& p : grp.points) {
      const double viol = p.rhs - (su + p.d * sv);
      rep.max_cover_violation = std::max(rep.max_cover_violation, viol);
    }
  }
  for (const auto& w : lp.curvature) {
    const double s = dot(w, alpha);
    rep.max_curvature_violation = std::max(
        rep.max_curvature_violation, std::abs(s) - lp.curvature_rhs);
  }
  for (const auto& bin : lp.bins) {
    double s = 0.0;
    for (int idx : bin) s += alpha[idx];
    rep.max_bin_violation = std::max(rep.max_bin_violation, s - lp.bin_rhs);
  }
  rep.min_alpha = alpha.empty() ? 0.0
                                : *std::min_element(alpha.begin(), alpha.end());
  rep.pass = rep.max_cover_violation <= tol &&
             rep.max_curvature_violation <= tol &&
             rep.max_bin_violation <= tol && rep.min_alpha >= -tol;
  return rep;
}

namespace {

const char* kind_name(RowKind k)
{
  switch (k) {
    case RowKind::cover: return "cover";
    case RowKind::curvature_plus: return "curvature_plus";
    case RowKind::curvature_minus: return "curvature_minus";
    case RowKind::bin_mass: return "bin_mass";
  }
  return "?";
}

RowKind kind_from_name(const std::string& s)
{
  if (s == "cover") return RowKind::cover;
  if (s == "curvature_plus") return RowKind::curvature_plus;
  if (s == "curvature_minus") return RowKind::curvature_minus;
  if (s == "bin_mass") return RowKind::bin_mass;
  throw std::invalid_argument("unknown row kind '" + s + "'");
}

}  // namespace

void write_lp_text(std::ostream& os, const std::vector<ConstraintRow>& rows,
                   int n_vars)
{
  os << "frontier-lp v1 " << n_vars << ' ' << rows.size() << '\n';
  for (const auto& r : rows) {
    os << kind_name(r.kind) << ' ' << (r.sense == RowSense::ge ? "ge" : "le")
       << ' ' << format_double(r.rhs);
    for (const auto& [k, v] : r.entries) os << ' ' << k << ':' << format_double(v);
    os << '\n';
  }
}

void write_lp_text(std::ostream& os, const FrontierLP& lp)
{
  write_lp_text(os, lp.rows(), lp.n_vars);
}

GenericLP read_lp_text(std::istream& is)
{
  GenericLP lp;
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("line 1: empty LP file");
  {
    std::istringstream hs(line);
    std::string tag, ver;
    std::size_t nrows = 0;
    if (!(hs >> tag >> ver >> lp.n_vars >> nrows) || tag != "frontier-lp" ||
        ver != "v1")
      throw std::invalid_argument("line 1: expected 'frontier-lp v1 nvars nrows'");
    lp.rows.reserve(nrows);
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string kind, sense, rhs;
    if (!(rs >> kind >> sense >> rhs))
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": malformed row");
    ConstraintRow r;
    try {
      r.kind = kind_from_name(kind);
      if (sense == "ge")
        r.sense = RowSense::ge;
      else if (sense == "le")
        r.sense = RowSense::le;
      else
        throw std::invalid_argument("sense must be ge or le");
      r.rhs = parse_double(rhs);
      std::string ent;
      while (rs >> ent) {
        const auto colon = ent.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("entry '" + ent + "' missing ':'");
        const int k = std::stoi(ent.substr(0, colon));
        if (k < 0 || k >= lp.n_vars)
          throw std::invalid_argument("variable index out of range");
        r.entries.emplace_back(k, parse_double(ent.substr(colon + 1)));
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
    lp.rows.push_back(std::move(r));
  }
  return lp;
}

}  // namespace frontlp
