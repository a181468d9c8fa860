#pragma once

#include <cstddef>
#include <string>

// Inner-loop arithmetic kernels. Each operation has a scalar reference
// implementation and, where the hardware allows, an AVX2 or NEON variant.
// The variant is chosen once at startup from CPU capabilities; tests assert
// that all compiled variants agree with the scalar reference.

namespace fate::kernels {

enum class Backend { Scalar, Avx2, Neon };

// Backend selected for this process (CPU-detected unless forced).
Backend active_backend();
std::string backend_name(Backend b);

// Force a specific backend, e.g. to benchmark or to cross-check results.
// Throws fate::Error if the backend was not compiled in or the CPU lacks it.
void force_backend(Backend b);
bool backend_available(Backend b);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
double sum(const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double sum_neon(const double* x, std::size_t n);
double squared_distance_neon(const double* a, const double* b, std::size_t n);
#endif

}  // namespace detail

}  // namespace fate::kernels
