#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace frontlp {

enum class FrontierKind { constant, sine, sum_of_sines, user_table };

// 1-periodic ground-truth frontier with known smoothness constants.
// Built-ins are analytic; user tables interpolate linearly and support
// no derivatives.
struct FrontierFn {
  FrontierKind kind = FrontierKind::constant;
  double a0 = 1.0, a1 = 0.0, a2 = 0.0;
  std::vector<double> table_x, table_y;

  double f_min = 0, f_max = 0;
  double l_beta = 0;  // Hoelder coefficient of f' at exponent beta-1
  double beta = 2.0;
  double c_f = 0;  // int_0^1 f

  static FrontierFn constant(double c);
  static FrontierFn sine(double a0, double a1);
  static FrontierFn sum_of_sines(double a0, double a1, double a2);
  static FrontierFn user_table(std::vector<double> xs, std::vector<double> ys);

  // f, f' or f'' at x (any real, reduced mod 1).  order in 0..2.
  double eval(double x, int order) const;

  double lipschitz() const;  // sup |f'|
};

double eval_frontier(const FrontierFn& f, double x, int order);

struct SpacingStats {
  double max_gap = 0;   // max Delta X_i with X_0 = 0, X_{N+1} = 1
  double gap_bound = 0; // C_X log N / N with C_X = 5 f_max / f_min
};

// Increase-ordered observations drawn uniformly under the frontier graph.
struct SampleSet {
  int n = 0;
  std::vector<double> xs, ys;
  std::uint64_t seed = 0;
  SpacingStats spacing_stats;
  double acceptance_rate = 0;  // accepted / attempted during rejection

  // Index extension by periodic continuation: i in [1-n, 2n] (1-based)
  // maps to a base index in [1, n] plus an x-shift of -1, 0 or +1.
  struct PeriodicIndex {
    int base;       // 1-based index into xs/ys
    double xshift;  // -1, 0 or +1
  };
  PeriodicIndex periodic_index(int i) const;
  double x_at(int i) const;  // extended abscissa X_i, i in [1-n, 2n]
  double y_at(int i) const;
};

// Exact sampler: rejection from the box [0,1] x [0, f_max].
SampleSet sample_uniform_on_S(const FrontierFn& f, int n, std::uint64_t seed);

// Builds a SampleSet from raw (unordered) data, e.g. file ingestion.
SampleSet make_sample_set(std::vector<double> xs, std::vector<double> ys,
                          std::uint64_t seed = 0, double f_max_over_f_min = 1.0);

struct SpacingCheck {
  double max_gap = 0;
  double bound = 0;
  bool pass = false;
};

// Lemma A.2 diagnostic: max spacing against C_X log N / N.
SpacingCheck max_spacing_check(const SampleSet& s, const FrontierFn& f);

// CSV (header "x,y", shortest round-trip decimals) and JSON I/O.
void write_sample_csv(std::ostream& os, const SampleSet& s);
SampleSet read_sample_csv(std::istream& is);
std::string sample_to_json(const SampleSet& s);
SampleSet sample_from_json(const std::string& text);

}  // namespace frontlp
