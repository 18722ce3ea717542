#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and
// vectorized variants; the active variant is picked once at runtime from the
// CPU features and can be overridden with STRUCTCOV_ISA=scalar|avx2|neon.

#include <span>
#include <string_view>

namespace structcov::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Whether this build and this CPU can run `isa`.
bool isa_supported(Isa isa);

Isa active_isa();

/// Switches the dispatch table. Returns false (and changes nothing) when the
/// variant is unavailable.
bool set_isa(Isa isa);

/// Output columns of biweight_eval, each the same length as the input.
struct BiweightColumns {
  std::span<double> rho;           // rho(s)
  std::span<double> psi;           // rho'(s)
  std::span<double> dpsi;          // rho''(s), left limit at s == c
  std::span<double> psi_over_s;    // rho'(s)/s, equal to 1 at s == 0
  std::span<double> d_psi_over_s;  // d/ds [rho'(s)/s]
};

/// Tukey biweight with cutoff c at each s >= 0.
void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out);

double dot(std::span<const double> a, std::span<const double> b);

double max_abs(std::span<const double> a);

namespace scalar {
void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
}  // namespace scalar

namespace avx2 {
void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
}  // namespace avx2

namespace neon {
void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
}  // namespace neon

}  // namespace structcov::kernels
