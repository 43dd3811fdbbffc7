#include <doctest.h>

#include <cstring>
#include <tuple>
#include <vector>

#include "support.hpp"
#include "zenoguard/kernels.hpp"

namespace k = zenoguard::kernels;
using testing_support::gaussian_c;
using k::cplx;

namespace {

std::vector<cplx> buffer(std::size_t n) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = gaussian_c();
    return v;
}

double diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

struct ThreadGuard {
    int saved = k::max_threads();
    ~ThreadGuard() { k::set_thread_limit(saved); }
};

}  // namespace

TEST_CASE("gemm kernels agree") {
    using Shape = std::tuple<std::size_t, std::size_t, std::size_t>;
    for (auto [m, kk, n] : std::vector<Shape>{{1, 1, 1}, {3, 5, 7}, {16, 16, 16}, {33, 8, 21}}) {
        const auto a = buffer(m * kk), b = buffer(kk * n);
        std::vector<cplx> r(m * n), p(m * n);
        k::reference::gemm(a, b, r, m, kk, n);
        k::parallel::gemm(a, b, p, m, kk, n);
        CHECK(diff(r, p) < 1e-12);

        const auto bt = buffer(n * kk);
        k::reference::gemm_adjoint(a, bt, r, m, kk, n);
        k::parallel::gemm_adjoint(a, bt, p, m, kk, n);
        CHECK(diff(r, p) < 1e-12);
    }
}

TEST_CASE("kron kernels agree") {
    const auto a = buffer(2 * 3), b = buffer(4 * 5);
    std::vector<cplx> r(120), p(120);
    k::reference::kron(a, 2, 3, b, 4, 5, r);
    k::parallel::kron(a, 2, 3, b, 4, 5, p);
    CHECK(bitwise_equal(r, p));
}

TEST_CASE("apply_local kernels agree for scattered targets") {
    const std::vector<std::size_t> dims{2, 3, 2, 2};
    const std::size_t total = 24;
    for (const auto& targets : std::vector<std::vector<std::size_t>>{{0}, {1}, {3}, {0, 1}, {3, 0}, {2, 1, 3}}) {
        std::size_t local = 1;
        for (auto t : targets) local *= dims[t];
        const auto op = buffer(local * local);
        for (std::size_t cols : {1u, 5u, 24u}) {
            auto r = buffer(total * cols);
            auto p = r;
            k::reference::apply_local(dims, targets, op, r, cols);
            k::parallel::apply_local(dims, targets, op, p, cols);
            CHECK(diff(r, p) < 1e-12);
        }
    }
}

TEST_CASE("partial_trace kernels agree") {
    const std::vector<std::size_t> dims{2, 3, 2};
    const auto rho = buffer(12 * 12);
    for (const auto& keep : std::vector<std::vector<char>>{{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 0, 0}, {1, 1, 1}}) {
        std::size_t kept = 1;
        bool flags[3];
        for (std::size_t i = 0; i < 3; ++i) {
            flags[i] = keep[i] != 0;
            if (flags[i]) kept *= dims[i];
        }
        std::vector<cplx> r(kept * kept), p(kept * kept);
        k::reference::partial_trace(dims, flags, rho, r);
        k::parallel::partial_trace(dims, flags, rho, p);
        CHECK(diff(r, p) < 1e-12);
    }
}

TEST_CASE("parallel kernels are bitwise identical across thread counts") {
    ThreadGuard guard;
    const std::size_t n = 48;
    const auto a = buffer(n * n), b = buffer(n * n);
    const std::vector<std::size_t> dims{2, 2, 12};
    const std::vector<std::size_t> targets{1, 0};
    const auto op = buffer(16);
    const bool keep[] = {true, false, true};

    std::vector<std::vector<cplx>> results;
    for (int threads : {1, 2, 3, 4, 7}) {
        k::set_thread_limit(threads);
        std::vector<cplx> g(n * n), ga(n * n), tr(24 * 24);
        k::parallel::gemm(a, b, g, n, n, n);
        k::parallel::gemm_adjoint(a, b, ga, n, n, n);
        auto m = a;
        k::parallel::apply_local(dims, targets, op, m, n);
        k::parallel::partial_trace(dims, keep, a, tr);
        std::vector<cplx> all;
        for (const auto* v : {&g, &ga, &m, &tr}) all.insert(all.end(), v->begin(), v->end());
        results.push_back(std::move(all));
    }
    for (std::size_t i = 1; i < results.size(); ++i) CHECK(bitwise_equal(results[0], results[i]));
}
