#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relu3d/builders.hpp"
#include "relu3d/net3d.hpp"
#include "relu3d/requests.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

__extension__ typedef __float128 Quad;

constexpr double kBoundSlack = 1e-9;

struct ErrorReport {
  NormKind norm = NormKind::kSup;
  double p = std::numeric_limits<double>::infinity();
  double measured = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  std::string resolution;
  std::size_t points = 0;
  bool pass = false;
  std::optional<double> fitted_constant;
  std::vector<double> argmax;  // sup norm only
};

bool within_bound(double measured, double bound);
// Sets the bound and recomputes pass.
void set_bound(ErrorReport& r, double bound);
bool check_bound(const ErrorReport& r);

struct Box {
  std::vector<double> lo, hi;
  static Box cube(std::size_t d, double lo, double hi);
  // Bounded domains only.
  static Box from_domain(const Domain& dom, std::size_t d);
  std::size_t dim() const { return lo.size(); }
};

// Network values at the given points, in double or in binary128.
std::vector<double> evaluate_points(const Net3D& net, const std::vector<std::vector<double>>& pts,
                                    bool extended);

struct SupOptions {
  // Grid points per dimension; 0 picks 2^(height+4)+1 capped below.
  std::size_t points_per_dim = 0;
  std::size_t max_points_1d = 65537;
  std::size_t max_points_per_dim = 257;  // d >= 2
  std::size_t max_points = 4000000;
  // Local refinement around the arg-max: the step is halved this many times.
  std::size_t refine_halvings = 4;
  bool extended = false;
};
std::size_t default_sup_points(std::size_t height, std::size_t d, const SupOptions& opt = {});
ErrorReport sup_error(const Net3D& net, const ScalarField& f, const Box& box,
                      const SupOptions& opt = {});

struct LpOptions {
  // Gauss-Legendre nodes per dimension; 0 picks 2048 (d = 1), 256 (d = 2) or 64.
  std::size_t nodes_per_dim = 0;
  std::size_t order = 8;
  bool extended = false;
  SupOptions sup;  // used when p is infinite
};
// (integral over the box of |f - net|^p)^(1/p); p = infinity gives the sup norm.
ErrorReport lp_error(const Net3D& net, const ScalarField& f, double p, const Box& box,
                     const LpOptions& opt = {});

// Several finite exponents from one pass over the quadrature nodes.
std::vector<ErrorReport> lp_errors(const Net3D& net, const ScalarField& f, std::span<const double> ps,
                                   const Box& box, const LpOptions& opt = {});

// ||f||_p over the box by the same quadrature; p = infinity takes the max over the nodes.
double lp_norm(const ScalarField& f, double p, const Box& box, std::size_t nodes_per_dim = 0);

struct GaussOptions {
  double margin = 2.0;       // integrate over [-M - margin, M + margin]^d
  double panel_width = 0.0;  // 0 picks 0.25 (d = 1) or 1.0
  std::size_t order = 8;
  bool extended = true;
};
// L^2(gamma_d) error of a net supported in [-M, M]^d; the part of the target
// outside the integration box is taken from its closed-form Gaussian tail.
ErrorReport gauss_l2_error(const Net3D& net, const TargetSpec& target, double M_support,
                           const GaussOptions& opt = {});

struct MeasureOptions {
  double p = 2.0;  // for NormKind::kLp
  SupOptions sup;
  LpOptions lp;
  GaussOptions gauss;
};
// Measures a built network in the norm its report names, against the
// request's reference function, and compares with theoretical_bound.
ErrorReport measure(const BuildReport& report, const BuildRequest& req,
                    const MeasureOptions& opt = {});

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double param = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  std::size_t param_count = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  std::size_t height = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> extra;
};

struct SweepTable {
  std::string parameter;
  bool fitted_constant = false;
  std::vector<SweepRow> rows;  // sorted by param
};

SweepTable sweep(const BuildRequest& base, const std::string& parameter,
                 std::span<const double> values, const MeasureOptions& opt = {});

struct FitResult {
  double constant = 0.0;          // max measured/bound over the fitting half
  double max_holdout_ratio = 0.0; // max measured/bound over the held-out half
  bool pass = false;              // held-out ratios <= headroom * constant
  std::vector<double> anomalies;  // params where the error grew by more than 2%
};
// Fits on the first `split` fraction of the rows, checks the rest.
FitResult fit_and_check(const SweepTable& t, double split = 0.5, double headroom = 1.25);

void write_csv(const SweepTable& t, std::ostream& os);

// ---------------------------------------------------------------------------
// Comparison against the earlier fixed-height constructions

struct Table1Config {
  std::string row;  // polynomial | analytic-cube | ellipse | hermite
  std::vector<std::size_t> N;
  std::size_t d = 1;
};

struct Table1Row {
  std::string row;
  std::size_t N = 0;
  std::size_t d = 1;
  double error = 0.0;
  double bound = 0.0;
  SizeMetrics size;
  std::size_t flat_width = 0;
  std::size_t flat_params = 0;
  BaselineSize baseline;
};

std::vector<Table1Row> table1_report(const std::vector<Table1Config>& configs,
                                     const MeasureOptions& opt = {});
void write_table1_csv(const std::vector<Table1Row>& rows, std::ostream& os);
// The request each table row builds for a given N.
BuildRequest table1_request(const std::string& row, std::size_t N, std::size_t d);

}  // namespace relu3d
