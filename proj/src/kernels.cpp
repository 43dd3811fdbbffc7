#include "zenoguard/kernels.hpp"

#include <cassert>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zenoguard::kernels {

namespace {

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];
    return strides;
}

std::size_t product(std::span<const std::size_t> dims) {
    std::size_t p = 1;
    for (auto d : dims) p *= d;
    return p;
}

// Offsets of every multi-index over `subset` (big-endian in subset order).
std::vector<std::size_t> subset_offsets(std::span<const std::size_t> dims,
                                        std::span<const std::size_t> strides,
                                        std::span<const std::size_t> subset) {
    std::size_t count = 1;
    for (auto s : subset) count *= dims[s];
    std::vector<std::size_t> offsets(count, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rem = idx;
        std::size_t off = 0;
        for (std::size_t p = subset.size(); p-- > 0;) {
            const auto s = subset[p];
            off += (rem % dims[s]) * strides[s];
            rem /= dims[s];
        }
        offsets[idx] = off;
    }
    return offsets;
}

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> subset) {
    std::vector<bool> in(n, false);
    for (auto s : subset) in[s] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> digits_of(std::size_t index, std::span<const std::size_t> dims) {
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
        digits[i] = index % dims[i];
        index /= dims[i];
    }
    return digits;
}

}  // namespace

namespace reference {

void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
            c[i * n + j] = acc;
        }
}

void gemm_adjoint(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
                  std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * std::conj(b[j * k + l]);
            c[i * n + j] = acc;
        }
}

void kron(std::span<const cplx> a, std::size_t ar, std::size_t ac,
          std::span<const cplx> b, std::size_t br, std::size_t bc, std::span<cplx> out) {
    const std::size_t oc = ac * bc;
    for (std::size_t i = 0; i < ar; ++i)
        for (std::size_t j = 0; j < ac; ++j)
            for (std::size_t p = 0; p < br; ++p)
                for (std::size_t q = 0; q < bc; ++q)
                    out[(i * br + p) * oc + (j * bc + q)] = a[i * ac + j] * b[p * bc + q];
}

void apply_local(std::span<const std::size_t> dims, std::span<const std::size_t> targets,
                 std::span<const cplx> op, std::span<cplx> m, std::size_t cols) {
    const std::size_t total = product(dims);
    std::size_t local = 1;
    for (auto t : targets) local *= dims[t];
    assert(op.size() == local * local);

    // Full embedded operator, element by element from the digit expansion.
    std::vector<cplx> full(total * total, 0.0);
    for (std::size_t r = 0; r < total; ++r) {
        const auto rd = digits_of(r, dims);
        for (std::size_t c = 0; c < total; ++c) {
            const auto cd = digits_of(c, dims);
            bool spectators_match = true;
            for (std::size_t s = 0; s < dims.size(); ++s) {
                bool is_target = false;
                for (auto t : targets) is_target = is_target || t == s;
                if (!is_target && rd[s] != cd[s]) spectators_match = false;
            }
            if (!spectators_match) continue;
            std::size_t lr = 0, lc = 0;
            for (auto t : targets) {
                lr = lr * dims[t] + rd[t];
                lc = lc * dims[t] + cd[t];
            }
            full[r * total + c] = op[lr * local + lc];
        }
    }
    std::vector<cplx> result(total * cols);
    gemm(full, m, result, total, total, cols);
    std::copy(result.begin(), result.end(), m.begin());
}

void partial_trace(std::span<const std::size_t> dims, std::span<const bool> keep,
                   std::span<const cplx> rho, std::span<cplx> out) {
    const std::size_t total = product(dims);
    std::size_t kept = 1;
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (keep[s]) kept *= dims[s];
    std::fill(out.begin(), out.end(), cplx{0.0});
    for (std::size_t r = 0; r < total; ++r) {
        const auto rd = digits_of(r, dims);
        for (std::size_t c = 0; c < total; ++c) {
            const auto cd = digits_of(c, dims);
            bool traced_match = true;
            std::size_t kr = 0, kc = 0;
            for (std::size_t s = 0; s < dims.size(); ++s) {
                if (keep[s]) {
                    kr = kr * dims[s] + rd[s];
                    kc = kc * dims[s] + cd[s];
                } else if (rd[s] != cd[s]) {
                    traced_match = false;
                }
            }
            if (traced_match) out[kr * kept + kc] += rho[r * total + c];
        }
    }
}

}  // namespace reference

namespace parallel {

void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t m, std::size_t k, std::size_t n) {
    const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < mm; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* __restrict row = reinterpret_cast<double*>(c.data() + i * n);
        for (std::size_t j = 0; j < 2 * n; ++j) row[j] = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            const double sr = a[i * k + l].real(), si = a[i * k + l].imag();
            const double* __restrict brow = reinterpret_cast<const double*>(b.data() + l * n);
            for (std::size_t j = 0; j < n; ++j) {
                const double xr = brow[2 * j], xi = brow[2 * j + 1];
                row[2 * j] += sr * xr - si * xi;
                row[2 * j + 1] += sr * xi + si * xr;
            }
        }
    }
}

void gemm_adjoint(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
                  std::size_t m, std::size_t k, std::size_t n) {
    const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < mm; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* __restrict arow = reinterpret_cast<const double*>(a.data() + i * k);
        for (std::size_t j = 0; j < n; ++j) {
            const double* __restrict brow = reinterpret_cast<const double*>(b.data() + j * k);
            double re = 0.0, im = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                const double ar = arow[2 * l], ai = arow[2 * l + 1];
                const double br = brow[2 * l], bi = brow[2 * l + 1];
                re += ar * br + ai * bi;
                im += ai * br - ar * bi;
            }
            c[i * n + j] = {re, im};
        }
    }
}

void kron(std::span<const cplx> a, std::size_t ar, std::size_t ac,
          std::span<const cplx> b, std::size_t br, std::size_t bc, std::span<cplx> out) {
    const std::size_t oc = ac * bc;
    const auto rows = static_cast<std::ptrdiff_t>(ar * br);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t rr = 0; rr < rows; ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        const std::size_t i = r / br, p = r % br;
        cplx* orow = out.data() + r * oc;
        for (std::size_t j = 0; j < ac; ++j) {
            const cplx aij = a[i * ac + j];
            for (std::size_t q = 0; q < bc; ++q) orow[j * bc + q] = aij * b[p * bc + q];
        }
    }
}

void apply_local(std::span<const std::size_t> dims, std::span<const std::size_t> targets,
                 std::span<const cplx> op, std::span<cplx> m, std::size_t cols) {
    const auto strides = strides_of(dims);
    const auto local_offsets = subset_offsets(dims, strides, targets);
    const auto spectators = complement(dims.size(), targets);
    const auto bases = subset_offsets(dims, strides, spectators);
    const std::size_t local = local_offsets.size();
    assert(op.size() == local * local);

    const auto nb = static_cast<std::ptrdiff_t>(bases.size());
#pragma omp parallel
    {
        std::vector<cplx> in(local * cols), outv(local * cols);
#pragma omp for schedule(static)
        for (std::ptrdiff_t bb = 0; bb < nb; ++bb) {
            const std::size_t base = bases[static_cast<std::size_t>(bb)];
            for (std::size_t r = 0; r < local; ++r) {
                const cplx* src = m.data() + (base + local_offsets[r]) * cols;
                std::copy(src, src + cols, in.begin() + static_cast<std::ptrdiff_t>(r * cols));
            }
            for (std::size_t r = 0; r < local; ++r) {
                cplx* dst = outv.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c) dst[c] = 0.0;
                for (std::size_t l = 0; l < local; ++l) {
                    const cplx o = op[r * local + l];
                    if (o == cplx{0.0}) continue;
                    const cplx* src = in.data() + l * cols;
                    for (std::size_t c = 0; c < cols; ++c) dst[c] += o * src[c];
                }
            }
            for (std::size_t r = 0; r < local; ++r) {
                const cplx* src = outv.data() + r * cols;
                std::copy(src, src + cols, m.data() + (base + local_offsets[r]) * cols);
            }
        }
    }
}

void partial_trace(std::span<const std::size_t> dims, std::span<const bool> keep,
                   std::span<const cplx> rho, std::span<cplx> out) {
    const auto strides = strides_of(dims);
    std::vector<std::size_t> kept_subsystems, traced_subsystems;
    for (std::size_t s = 0; s < dims.size(); ++s)
        (keep[s] ? kept_subsystems : traced_subsystems).push_back(s);
    const auto kept = subset_offsets(dims, strides, kept_subsystems);
    const auto traced = subset_offsets(dims, strides, traced_subsystems);
    const std::size_t total = product(dims);
    const std::size_t dk = kept.size();

    const auto rows = static_cast<std::ptrdiff_t>(dk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < dk; ++j) {
            cplx acc = 0.0;
            for (auto t : traced) acc += rho[(kept[i] + t) * total + kept[j] + t];
            out[i * dk + j] = acc;
        }
    }
}

}  // namespace parallel

void set_thread_limit(int threads) {
#ifdef _OPENMP
    omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
#else
    (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace zenoguard::kernels
