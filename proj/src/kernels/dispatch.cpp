#include <atomic>
#include <cstdlib>
#include <string>

#include "structcov/error.hpp"
#include "structcov/kernels.hpp"

namespace structcov::kernels {

namespace {

struct Table {
  Isa isa;
  void (*biweight_eval)(std::span<const double>, double, const BiweightColumns&);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*max_abs)(std::span<const double>);
};

constexpr Table kScalar{Isa::scalar, &scalar::biweight_eval, &scalar::dot, &scalar::max_abs};
#if defined(STRUCTCOV_HAVE_AVX2)
constexpr Table kAvx2{Isa::avx2, &avx2::biweight_eval, &avx2::dot, &avx2::max_abs};
#endif
#if defined(STRUCTCOV_HAVE_NEON)
constexpr Table kNeon{Isa::neon, &neon::biweight_eval, &neon::dot, &neon::max_abs};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(STRUCTCOV_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
      return nullptr;
    case Isa::neon:
#if defined(STRUCTCOV_HAVE_NEON)
      return &kNeon;
#endif
      return nullptr;
  }
  return nullptr;
}

const Table* initial_table() {
  if (const char* env = std::getenv("STRUCTCOV_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (const Table* t = table_for(isa)) return t;
      }
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const Table* t = table_for(isa)) return t;
  }
  return &kScalar;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) { return table_for(isa) != nullptr; }

Isa active_isa() { return active().load()->isa; }

bool set_isa(Isa isa) {
  const Table* t = table_for(isa);
  if (t == nullptr) return false;
  active().store(t);
  return true;
}

void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out) {
  const std::size_t n = s.size();
  if (out.rho.size() < n || out.psi.size() < n || out.dpsi.size() < n || out.psi_over_s.size() < n ||
      out.d_psi_over_s.size() < n) {
    throw InvalidArgument("biweight_eval: output column shorter than input");
  }
  active().load()->biweight_eval(s, c, out);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  return active().load()->dot(a, b);
}

double max_abs(std::span<const double> a) { return active().load()->max_abs(a); }

}  // namespace structcov::kernels
