// Every SIMD kernel table against the scalar reference.

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "xlemb/kernels.hpp"

using namespace xlemb;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

void check_close(double a, double b, double rel) {
    CHECK(std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b))));
}

}  // namespace

TEST_CASE("scalar kernels on hand-computed inputs") {
    const Kernels& k = kernels_for(Isa::scalar);
    std::vector<double> a{1, 2, 3}, b{4, -1, 0.5}, out(3);
    CHECK(k.dot(a.data(), b.data(), 3) == doctest::Approx(1 * 4 - 2 + 1.5));
    CHECK(k.sq_dist(a.data(), b.data(), 3) == doctest::Approx(9 + 9 + 6.25));
    k.sub(out.data(), a.data(), b.data(), 3);
    CHECK(out == std::vector<double>{-3, 3, 2.5});
    k.axpy(a.data(), 2.0, b.data(), 3);
    CHECK(a == std::vector<double>{9, 0, 4});
    k.scale(a.data(), 0.5, 3);
    CHECK(a == std::vector<double>{4.5, 0, 2});
    k.add(a.data(), b.data(), 3);
    CHECK(a == std::vector<double>{8.5, -1, 2.5});

    std::vector<double> w{1.0}, g{0.5}, acc{0.0};
    k.adagrad(w.data(), g.data(), acc.data(), 0.2, 1e-8, 1);
    CHECK(acc[0] == 0.25);
    CHECK(w[0] == doctest::Approx(1.0 - 0.2 * 0.5 / (0.5 + 1e-8)));
}

TEST_CASE("scalar is always available and listed first") {
    const auto isas = available_isas();
    REQUIRE(!isas.empty());
    CHECK(isas.front() == Isa::scalar);
    CHECK(kernels_for(Isa::scalar).isa == Isa::scalar);
}

TEST_CASE("SIMD kernels match the scalar reference") {
    const Kernels& ref = kernels_for(Isa::scalar);
    std::mt19937_64 rng(42);
    for (Isa isa : available_isas()) {
        if (isa == Isa::scalar) continue;
        CAPTURE(isa_name(isa));
        const Kernels& simd = kernels_for(isa);
        CHECK(simd.isa == isa);
        for (std::size_t n = 0; n <= 67; ++n) {
            CAPTURE(n);
            const auto a = random_vec(rng, n), b = random_vec(rng, n);
            check_close(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-13);
            check_close(simd.sq_dist(a.data(), b.data(), n), ref.sq_dist(a.data(), b.data(), n), 1e-13);

            std::vector<double> o1(n), o2(n);
            simd.sub(o1.data(), a.data(), b.data(), n);
            ref.sub(o2.data(), a.data(), b.data(), n);
            CHECK(o1 == o2);

            auto x1 = a, x2 = a;
            simd.add(x1.data(), b.data(), n);
            ref.add(x2.data(), b.data(), n);
            CHECK(x1 == x2);

            simd.scale(x1.data(), -0.37, n);
            ref.scale(x2.data(), -0.37, n);
            CHECK(x1 == x2);

            simd.axpy(x1.data(), 1.7, b.data(), n);
            ref.axpy(x2.data(), 1.7, b.data(), n);
            for (std::size_t i = 0; i < n; ++i) check_close(x1[i], x2[i], 1e-14);

            auto w1 = a, w2 = a;
            auto acc1 = b, acc2 = b;
            for (auto& v : acc1) v = std::abs(v);
            acc2 = acc1;
            const auto g = random_vec(rng, n);
            simd.adagrad(w1.data(), g.data(), acc1.data(), 0.2, 1e-8, n);
            ref.adagrad(w2.data(), g.data(), acc2.data(), 0.2, 1e-8, n);
            for (std::size_t i = 0; i < n; ++i) {
                check_close(acc1[i], acc2[i], 1e-14);
                check_close(w1[i], w2[i], 1e-14);
            }
        }
    }
}

TEST_CASE("unavailable ISA is rejected") {
    bool neon_available = false, avx2_available = false;
    for (Isa i : available_isas()) {
        neon_available |= i == Isa::neon;
        avx2_available |= i == Isa::avx2;
    }
    if (!neon_available) CHECK_THROWS_AS(kernels_for(Isa::neon), std::runtime_error);
    if (!avx2_available) CHECK_THROWS_AS(kernels_for(Isa::avx2), std::runtime_error);
}
