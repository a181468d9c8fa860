#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "fate/kernels.hpp"
#include "fate/rng.hpp"

using namespace fate;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand results") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    CHECK(kernels::detail::dot_scalar(a.data(), b.data(), 3) == doctest::Approx(32.0));
    CHECK(kernels::detail::sum_scalar(a.data(), 3) == doctest::Approx(6.0));
    CHECK(kernels::detail::squared_distance_scalar(a.data(), b.data(), 3) ==
          doctest::Approx(27.0));
    std::vector<double> y{1, 1, 1};
    kernels::detail::axpy_scalar(2.0, a.data(), y.data(), 3);
    CHECK(y == std::vector<double>{3, 5, 7});
}

TEST_CASE("every available backend agrees with the scalar reference") {
    const kernels::Backend initial = kernels::active_backend();
    Rng rng = make_rng(20240201);

    for (kernels::Backend backend :
         {kernels::Backend::Avx2, kernels::Backend::Neon}) {
        if (!kernels::backend_available(backend)) continue;
        CAPTURE(kernels::backend_name(backend));

        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 255u,
                              1024u}) {
            const auto a = random_vec(n, rng);
            const auto b = random_vec(n, rng);

            kernels::force_backend(backend);
            const double dot_simd = kernels::dot(a.data(), b.data(), n);
            const double sum_simd = kernels::sum(a.data(), n);
            const double dist_simd = kernels::squared_distance(a.data(), b.data(), n);
            std::vector<double> y_simd = b;
            kernels::axpy(1.5, a.data(), y_simd.data(), n);

            kernels::force_backend(kernels::Backend::Scalar);
            const double dot_ref = kernels::dot(a.data(), b.data(), n);
            const double sum_ref = kernels::sum(a.data(), n);
            const double dist_ref = kernels::squared_distance(a.data(), b.data(), n);
            std::vector<double> y_ref = b;
            kernels::axpy(1.5, a.data(), y_ref.data(), n);

            CHECK(dot_simd == doctest::Approx(dot_ref).epsilon(1e-12));
            CHECK(sum_simd == doctest::Approx(sum_ref).epsilon(1e-12));
            CHECK(dist_simd == doctest::Approx(dist_ref).epsilon(1e-12));
            // Elementwise, FMA vs mul+add differ by at most one rounding.
            REQUIRE(y_simd.size() == y_ref.size());
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(y_simd[i] == doctest::Approx(y_ref[i]).epsilon(1e-13));
            }
        }
    }
    kernels::force_backend(initial);
}

TEST_CASE("forcing an unavailable backend throws") {
#if !defined(__aarch64__) && !defined(__ARM_NEON)
    CHECK_THROWS(kernels::force_backend(kernels::Backend::Neon));
#endif
    CHECK(kernels::backend_available(kernels::Backend::Scalar));
}
