#include "fate/kernels.hpp"

#include <atomic>

#include "fate/errors.hpp"

namespace fate::kernels {

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using SumFn = double (*)(const double*, std::size_t);

struct Vtable {
    Backend backend;
    DotFn dot;
    AxpyFn axpy;
    SumFn sum;
    DotFn squared_distance;
};

constexpr Vtable kScalar{Backend::Scalar, detail::dot_scalar, detail::axpy_scalar,
                         detail::sum_scalar, detail::squared_distance_scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2{Backend::Avx2, detail::dot_avx2, detail::axpy_avx2,
                       detail::sum_avx2, detail::squared_distance_avx2};
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
constexpr Vtable kNeon{Backend::Neon, detail::dot_neon, detail::axpy_neon,
                       detail::sum_neon, detail::squared_distance_neon};
#endif

const Vtable* detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    return &kNeon;
#endif
    return &kScalar;
}

std::atomic<const Vtable*> g_active{nullptr};

const Vtable* active() {
    const Vtable* v = g_active.load(std::memory_order_acquire);
    if (!v) {
        v = detect();
        g_active.store(v, std::memory_order_release);
    }
    return v;
}

}  // namespace

Backend active_backend() { return active()->backend; }

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

void force_backend(Backend b) {
    if (!backend_available(b)) {
        throw Error("kernel backend not available on this host: " + backend_name(b));
    }
    switch (b) {
        case Backend::Scalar:
            g_active.store(&kScalar, std::memory_order_release);
            break;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            g_active.store(&kAvx2, std::memory_order_release);
#endif
            break;
        case Backend::Neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
            g_active.store(&kNeon, std::memory_order_release);
#endif
            break;
    }
}

double dot(const double* a, const double* b, std::size_t n) { return active()->dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active()->axpy(alpha, x, y, n);
}

double sum(const double* x, std::size_t n) { return active()->sum(x, n); }

double squared_distance(const double* a, const double* b, std::size_t n) {
    return active()->squared_distance(a, b, n);
}

}  // namespace fate::kernels
