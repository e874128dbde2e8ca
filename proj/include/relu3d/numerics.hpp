#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace relu3d {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> v);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1,1].
QuadratureRule gauss_legendre(std::size_t n);
// Gauss-Legendre rule of the given order on each of `panels` equal panels of [a,b].
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                        std::size_t order = 8);
// Gauss-Hermite for the standard normal density: weights sum to 1.
QuadratureRule gauss_hermite(std::size_t n);

double normal_pdf(double x);
// P(|Z| <= M) for standard normal Z.
double normal_mass_inside(double M);

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
// Least squares y ~ slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace relu3d
