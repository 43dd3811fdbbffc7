#pragma once

// Dense complex kernels on row-major buffers.
//
// `parallel` is the production path (OpenMP over independent output rows, so
// results do not depend on the thread count). `reference` holds textbook
// implementations kept for testing and benchmarking; they are never called
// from the simulator.

#include <complex>
#include <cstddef>
#include <span>

namespace zenoguard::kernels {

using cplx = std::complex<double>;

namespace reference {

// c (m x n) = a (m x k) * b (k x n)
void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t m, std::size_t k, std::size_t n);

// c (m x n) = a (m x k) * adjoint(b), b is n x k
void gemm_adjoint(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
                  std::size_t m, std::size_t k, std::size_t n);

void kron(std::span<const cplx> a, std::size_t ar, std::size_t ac,
          std::span<const cplx> b, std::size_t br, std::size_t bc, std::span<cplx> out);

// m (D x cols) <- embed(op, targets) * m. Builds the full D x D operator.
void apply_local(std::span<const std::size_t> dims, std::span<const std::size_t> targets,
                 std::span<const cplx> op, std::span<cplx> m, std::size_t cols);

// out (Dk x Dk) = trace over subsystems with keep[i] == false.
void partial_trace(std::span<const std::size_t> dims, std::span<const bool> keep,
                   std::span<const cplx> rho, std::span<cplx> out);

}  // namespace reference

namespace parallel {

void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t m, std::size_t k, std::size_t n);

void gemm_adjoint(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
                  std::size_t m, std::size_t k, std::size_t n);

void kron(std::span<const cplx> a, std::size_t ar, std::size_t ac,
          std::span<const cplx> b, std::size_t br, std::size_t bc, std::span<cplx> out);

// Gather/scatter over the target digits; never materializes the embedded operator.
void apply_local(std::span<const std::size_t> dims, std::span<const std::size_t> targets,
                 std::span<const cplx> op, std::span<cplx> m, std::size_t cols);

void partial_trace(std::span<const std::size_t> dims, std::span<const bool> keep,
                   std::span<const cplx> rho, std::span<cplx> out);

}  // namespace parallel

// Caps the OpenMP team size; 0 restores the runtime default.
void set_thread_limit(int threads);
int max_threads();

}  // namespace zenoguard::kernels
