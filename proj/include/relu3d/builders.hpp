#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relu3d/net3d.hpp"
#include "relu3d/poly.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

enum class NormKind { kSup, kLp, kGaussL2 };

struct BuildReport {
  explicit BuildReport(Net3D n) : net(std::move(n)) {}

  Net3D net;
  // Sizes of the network this builder emits; depth and height are exact,
  // width is an upper bound.
  SizeMetrics expected;
  // Width, depth and height from the theorem statement.
  SizeMetrics stated;
  // Printed height formula before clamping (may differ from expected.height).
  std::optional<double> stated_height_raw;
  // Error bound in `norm`. When fitted_constant is set this is the rate with
  // the unknown constant taken as 1.
  double theoretical_bound = 0.0;
  bool fitted_constant = false;
  // Set when a precondition of the bound could not be certified.
  bool empirical = false;
  std::string bound_formula_id;
  NormKind norm = NormKind::kSup;
  std::size_t dim = 1;
  Domain domain;
  // Weights span many orders of magnitude; evaluate in extended precision.
  bool extended_precision = false;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> notes;

  double input(const std::string& key) const;
  double diagnostic(const std::string& key) const;
};

// Throws InvalidArgument if depth or height differ from `expected` or the
// width exceeds it.
void check_metrics(const BuildReport& r);

// ---------------------------------------------------------------------------
// Polynomials on [0,1]^d

struct PolyBuildOptions {
  // Build only monomials with nonzero coefficient and their ancestors.
  bool prune = true;
  std::size_t max_width = 200000;
};

// sum_k a_k x^k on [0,1]; every power up to n = coeffs.size() - 1 is built.
BuildReport build_poly1d(std::span<const double> coeffs, std::size_t H);
BuildReport build_polyNd(const PolyND& p, std::size_t H, const PolyBuildOptions& opt = {});

// Smooth target on [0,1] through its Chebyshev interpolant of degree N + 1.
BuildReport build_smooth1d(const TargetSpec& target, std::size_t N);

// Truncated power series on [0, 1 - delta]^d.
BuildReport build_analytic_cube(const TargetSpec& target, std::size_t N, double delta,
                                std::size_t d);

// Truncated tensor Chebyshev interpolant on [0,1]^d.
BuildReport build_analytic_ellipse(const TargetSpec& target, std::size_t N, double rho,
                                   std::size_t d);

// Smallest H with 2(m+1) 3^m 3 m^2 2^-2(H+1) <= 2^-m, m = N + 1.
std::size_t smooth_height(std::size_t N);
double smooth_height_printed(std::size_t N);
// Smallest H >= 1 with 6 N 2^-2(H+1) (e(N+d)/d)^d <= (1-delta)^N.
std::size_t cube_height(std::size_t N, double delta, std::size_t d);
double cube_height_printed(std::size_t N, double delta, std::size_t d);
std::size_t ellipse_height(std::size_t N, double rho, std::size_t d);

// ---------------------------------------------------------------------------
// Hermite constructions under the Gaussian measure

// Clipped approximation of the normalized Hermite polynomial of degree n:
// exact clip window in layer 1, then the power chain of x/M.
BuildReport build_clipped_hermite(std::size_t n, double M, double delta, std::size_t H);

struct HermiteParams {
  std::size_t n = 1;
  double B = 1.0;
  double M_formula = 0.0;  // sqrt(12 n ln(6n) + 24 B sqrt(n))
  double M = 0.0;          // M_formula rounded up to a multiple of 2^-8
  double H_real = 0.0;
  std::size_t H = 0;
  double H_printed = 0.0;
  double delta = 0.0;      // power of two
  double target = 0.0;     // e^{-B sqrt(n)}
  double interior_at_real = 0.0;  // (sqrt6 M)^n 3 n^2 2^-2(H_real+1)
  double interior = 0.0;          // same at the ceiled H
  double tail = 0.0;              // (sqrt(6n) M)^n e^{-M^2/4} / sqrt(2 pi)
  double band = 0.0;              // transition band contribution
  double total = 0.0;             // interior + tail + band
};
HermiteParams choose_hermite_params(std::size_t n, double B);

// sum over 0 <= nu <= N of <f, He_nu> times the product of clipped Hermite
// nets; beta has one entry per coordinate (or one shared entry).
BuildReport build_hermite_gauss(const TargetSpec& target, std::size_t N, std::size_t d,
                                std::vector<double> beta);

// ---------------------------------------------------------------------------
// Trigonometric nets and L^p approximation on [-1,1]^d

enum class TrigKind { kCos, kSin };

// cos(k pi x) or sin(k pi x) on [-1,1] within 2^-N.
BuildReport build_trig(std::size_t k, std::size_t N, TrigKind kind);

struct LpBuildOptions {
  std::size_t nodes = 0;            // T_n quadrature nodes per dimension
  double prune = 1e-13;             // relative coefficient cutoff
  std::size_t max_width = 400000;
};
BuildReport build_lp(const TargetSpec& target, std::size_t N1, std::size_t N2, std::size_t r,
                     std::size_t d, const LpBuildOptions& opt = {});

// Polynomial for cos(pi z) on [0,1] used by every trig net: interpolant of the
// smallest degree meeting `2^-(N+2)`, padded to degree max(N+1, that degree).
struct CosineChainSpec {
  std::vector<double> coeffs;  // padded monomial coefficients
  std::size_t effective_degree = 0;
  std::size_t H = 0;
  double interp_bound = 0.0;
  double network_bound = 0.0;
};
CosineChainSpec cosine_chain_spec(std::size_t N);

// ---------------------------------------------------------------------------
// Statement formulas

struct SizeParams {
  std::size_t n = 1;    // polynomial degree
  std::size_t N = 1;
  std::size_t H = 1;
  std::size_t d = 1;
  std::size_t k = 1;    // trig frequency
  std::size_t N1 = 1;
  std::size_t N2 = 1;
  std::size_t r = 1;
  double delta = 0.5;
  double rho = 2.4;
  double B = 1.0;
  double amax = 1.0;    // max |coefficient|
  double omega = 0.0;   // modulus of smoothness at 1/N1
  double f_norm = 1.0;  // ||f||_p
  double B_r = 1.0;
  double C_r = 1.0;
};

// theorem_id in {poly, polyNd, smooth, analytic-cube, ellipse, hermite, trig, lp}.
SizeMetrics expected_size(const std::string& theorem_id, const SizeParams& p);
double expected_bound(const std::string& theorem_id, const SizeParams& p);

// Sizes reported for the earlier fixed-height constructions the statements
// are compared against (big-O formulas evaluated with unit constants).
struct BaselineSize {
  std::string row;
  double width = 0.0;   // 0 when not reported
  double depth = 0.0;
  double height = 1.0;
};
// row in {polynomial, analytic-cube, ellipse, hermite}.
BaselineSize table1_baseline(const std::string& row, const SizeParams& p);

}  // namespace relu3d
