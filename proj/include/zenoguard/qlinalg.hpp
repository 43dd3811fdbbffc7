#pragma once

// Dense complex linear algebra for small open-system simulations.
//
// Index convention: composite indices are big-endian in layout order, i.e.
// the first listed subsystem is the most significant digit. Every module
// builds operators with this convention.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace zenoguard::linalg {

using cplx = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kNormTol = 1e-9;
inline constexpr double kSpectrumTol = 1e-8;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);
    static ComplexMatrix column(std::vector<cplx> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;
    // max |M_ij - conj(M_ji)|; requires a square matrix.
    double hermiticity_error() const;
    bool is_hermitian(double tol = kHermitianTol) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

// a * adjoint(b) without forming the adjoint.
ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b);
// u * m * adjoint(u)
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
// max |U^dag U - I|
double unitarity_error(const ComplexMatrix& u);
// Smallest max|a - e^{i phi} b| over global phases phi.
double phase_aligned_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors);

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are eigenvectors
};

// Cyclic complex Jacobi. Throws NotHermitian outside `tol`, NonConvergence if
// the off-diagonal norm does not drop below 1e-12 * max(1, ||m||_F).
EigenDecomposition eig_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

// exp(-i h dt)
ComplexMatrix propagator(const ComplexMatrix& h, double dt);
ComplexMatrix propagator(const EigenDecomposition& eig, double dt);

namespace ops {
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
// Truncated bosonic annihilation operator on levels 0..dim-1.
ComplexMatrix annihilation(std::size_t dim);
}  // namespace ops

class SubsystemLayout {
public:
    SubsystemLayout() = default;
    SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels);

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return dims_.size(); }
    std::size_t total_dimension() const noexcept;

    // Throws UnknownLabel.
    std::size_t position(const std::string& label) const;
    bool contains(const std::string& label) const;

    SubsystemLayout appended(const std::string& label, std::size_t dim) const;

    bool operator==(const SubsystemLayout&) const = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::string> labels_;
};

// Full operator acting as `op` on `targets` (in the listed order) and identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, const SubsystemLayout& layout,
                    std::span<const std::size_t> targets);

// m <- embed(op, targets) * m, in place, for any number of columns.
void apply_local(ComplexMatrix& m, const ComplexMatrix& op, const SubsystemLayout& layout,
                 std::span<const std::size_t> targets);
// rho <- embed(op) * rho * embed(op)^dag
void conjugate_local(ComplexMatrix& rho, const ComplexMatrix& op, const SubsystemLayout& layout,
                     std::span<const std::size_t> targets);

enum class StateForm { Pure, Density };

class QuantumState {
public:
    QuantumState() = default;

    // Validated constructors: enforce the normalization/Hermiticity/positivity invariants.
    static QuantumState pure(SubsystemLayout layout, ComplexMatrix vector);
    static QuantumState density(SubsystemLayout layout, ComplexMatrix rho);
    // Intermediate states (unnormalized branches, linearized steps). Shape-checked only.
    static QuantumState unchecked(SubsystemLayout layout, StateForm form, ComplexMatrix data);

    const SubsystemLayout& layout() const noexcept { return layout_; }
    StateForm form() const noexcept { return form_; }
    bool is_pure() const noexcept { return form_ == StateForm::Pure; }
    const ComplexMatrix& data() const noexcept { return data_; }
    std::size_t dimension() const noexcept { return data_.rows(); }

    // Squared norm for pure form, real trace for density form.
    double weight() const;
    QuantumState to_density() const;

private:
    QuantumState(SubsystemLayout layout, StateForm form, ComplexMatrix data);

    SubsystemLayout layout_;
    StateForm form_ = StateForm::Pure;
    ComplexMatrix data_;
};

// Reduced density matrix on `keep` (kept in layout order). Throws UnknownLabel.
QuantumState partial_trace(const QuantumState& state, std::span<const std::string> keep);
QuantumState partial_trace(const QuantumState& state, std::initializer_list<std::string> keep);

// <target|rho|target>, clamped to [0,1] after a 1e-9 range check. Throws DimensionMismatch.
double fidelity(const QuantumState& state, const QuantumState& target);

}  // namespace zenoguard::linalg
