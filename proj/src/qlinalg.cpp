#include "zenoguard/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "zenoguard/errors.hpp"
#include "zenoguard/kernels.hpp"

namespace zenoguard::linalg {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

std::string shape(const ComplexMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    require(data_.size() == rows * cols, ErrorCode::DimensionMismatch,
            "entries length " + std::to_string(data_.size()) + " != rows*cols");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> entries)
    : ComplexMatrix(rows, cols, std::vector<cplx>(entries)) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::column(std::vector<cplx> values) {
    const auto n = values.size();
    return ComplexMatrix(n, 1, std::move(values));
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

cplx ComplexMatrix::trace() const {
    require(is_square(), ErrorCode::DimensionMismatch, "trace of " + shape(*this));
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_error() const {
    require(is_square(), ErrorCode::DimensionMismatch, "hermiticity of " + shape(*this));
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    return is_square() && hermiticity_error() <= tol;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::DimensionMismatch,
            shape(*this) + " + " + shape(other));
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::DimensionMismatch,
            shape(*this) + " - " + shape(other));
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
    for (auto& z : data_) z *= scalar;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, shape(a) + " * " + shape(b));
    ComplexMatrix c(a.rows(), b.cols());
    kernels::parallel::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols() == b.cols(), ErrorCode::DimensionMismatch, shape(a) + " * adj " + shape(b));
    ComplexMatrix c(a.rows(), b.rows());
    kernels::parallel::gemm_adjoint(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
    return multiply_adjoint(u * m, u);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
            shape(a) + " vs " + shape(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

double unitarity_error(const ComplexMatrix& u) {
    return max_abs_diff(multiply_adjoint(u.adjoint(), u.adjoint()),
                        ComplexMatrix::identity(u.cols()));
}

double phase_aligned_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
            shape(a) + " vs " + shape(b));
    // The optimal phase aligns the overlap <b, a> to the positive real axis.
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) overlap += std::conj(b.data()[i]) * a.data()[i];
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0};
    return max_abs_diff(a, b * phase);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    kernels::parallel::kron(a.data(), a.rows(), a.cols(), b.data(), b.rows(), b.cols(), out.data());
    return out;
}

ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
    ComplexMatrix acc = ComplexMatrix::identity(1);
    for (const auto& f : factors) acc = kron(acc, f);
    return acc;
}

EigenDecomposition eig_hermitian(const ComplexMatrix& m, double tol) {
    require(m.is_square(), ErrorCode::DimensionMismatch, "eig_hermitian of " + shape(m));
    const double herr = m.hermiticity_error();
    require(herr <= tol, ErrorCode::NotHermitian,
            "max |M - M^dag| = " + std::to_string(herr));

    const std::size_t n = m.rows();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
            a(j, i) = std::conj(a(i, j));
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    const double threshold = 1e-12 * std::max(1.0, a.frobenius_norm());
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps && off_norm() >= threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const cplx phase = apq / r;  // e^{i phi}
                const double zeta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
                const double t = (zeta >= 0.0 ? -1.0 : 1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // J = diag(1, e^{-i phi}) * [[c, -s], [s, c]] on the (p, q) plane.
                const cplx jpp = c, jpq = -s;
                const cplx jqp = s * std::conj(phase), jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if (off_norm() >= threshold)
        throw Error(ErrorCode::NonConvergence,
                    "Jacobi did not converge in " + std::to_string(kMaxSweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]).real();
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = v(k, order[c]);
    }
    return out;
}

ComplexMatrix propagator(const EigenDecomposition& eig, double dt) {
    const std::size_t n = eig.values.size();
    ComplexMatrix scaled = eig.vectors;
    for (std::size_t c = 0; c < n; ++c) {
        const cplx phase = std::polar(1.0, -eig.values[c] * dt);
        for (std::size_t k = 0; k < n; ++k) scaled(k, c) *= phase;
    }
    return multiply_adjoint(scaled, eig.vectors);
}

ComplexMatrix propagator(const ComplexMatrix& h, double dt) {
    return propagator(eig_hermitian(h), dt);
}

namespace ops {

ComplexMatrix sigma_x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix sigma_y() { return ComplexMatrix(2, 2, {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}); }
ComplexMatrix sigma_z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }

ComplexMatrix annihilation(std::size_t dim) {
    ComplexMatrix a(dim, dim);
    for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

}  // namespace ops

SubsystemLayout::SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
    require(dims_.size() == labels_.size(), ErrorCode::DimensionMismatch,
            "layout needs one label per subsystem");
    for (auto d : dims_) require(d > 0, ErrorCode::InvalidArgument, "subsystem dimension must be positive");
    for (std::size_t i = 0; i < labels_.size(); ++i)
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            require(labels_[i] != labels_[j], ErrorCode::InvalidArgument, "duplicate label " + labels_[i]);
}

std::size_t SubsystemLayout::total_dimension() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t SubsystemLayout::position(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    require(it != labels_.end(), ErrorCode::UnknownLabel, label);
    return static_cast<std::size_t>(it - labels_.begin());
}

bool SubsystemLayout::contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

SubsystemLayout SubsystemLayout::appended(const std::string& label, std::size_t dim) const {
    auto dims = dims_;
    auto labels = labels_;
    dims.push_back(dim);
    labels.push_back(label);
    return SubsystemLayout(std::move(dims), std::move(labels));
}

namespace {

void check_targets(const ComplexMatrix& op, const SubsystemLayout& layout,
                   std::span<const std::size_t> targets) {
    std::size_t local = 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        require(targets[i] < layout.size(), ErrorCode::InvalidArgument, "target out of range");
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            require(targets[i] != targets[j], ErrorCode::InvalidArgument, "repeated target");
        local *= layout.dims()[targets[i]];
    }
    require(op.rows() == local && op.cols() == local, ErrorCode::DimensionMismatch,
            "local operator " + shape(op) + " on targets of dimension " + std::to_string(local));
}

}  // namespace

ComplexMatrix embed(const ComplexMatrix& op, const SubsystemLayout& layout,
                    std::span<const std::size_t> targets) {
    check_targets(op, layout, targets);
    auto full = ComplexMatrix::identity(layout.total_dimension());
    kernels::parallel::apply_local(layout.dims(), targets, op.data(), full.data(), full.cols());
    return full;
}

void apply_local(ComplexMatrix& m, const ComplexMatrix& op, const SubsystemLayout& layout,
                 std::span<const std::size_t> targets) {
    check_targets(op, layout, targets);
    require(m.rows() == layout.total_dimension(), ErrorCode::DimensionMismatch,
            "operand " + shape(m) + " vs layout dimension " + std::to_string(layout.total_dimension()));
    kernels::parallel::apply_local(layout.dims(), targets, op.data(), m.data(), m.cols());
}

void conjugate_local(ComplexMatrix& rho, const ComplexMatrix& op, const SubsystemLayout& layout,
                     std::span<const std::size_t> targets) {
    apply_local(rho, op, layout, targets);
    rho = rho.adjoint();
    apply_local(rho, op, layout, targets);
    rho = rho.adjoint();
}

QuantumState::QuantumState(SubsystemLayout layout, StateForm form, ComplexMatrix data)
    : layout_(std::move(layout)), form_(form), data_(std::move(data)) {
    const auto d = layout_.total_dimension();
    if (form_ == StateForm::Pure)
        require(data_.rows() == d && data_.cols() == 1, ErrorCode::DimensionMismatch,
                "pure state " + shape(data_) + " for layout dimension " + std::to_string(d));
    else
        require(data_.rows() == d && data_.cols() == d, ErrorCode::DimensionMismatch,
                "density " + shape(data_) + " for layout dimension " + std::to_string(d));
}

QuantumState QuantumState::pure(SubsystemLayout layout, ComplexMatrix vector) {
    QuantumState s(std::move(layout), StateForm::Pure, std::move(vector));
    const double w = s.weight();
    require(std::abs(w - 1.0) <= kNormTol, ErrorCode::NotNormalized,
            "squared norm " + std::to_string(w));
    return s;
}

QuantumState QuantumState::density(SubsystemLayout layout, ComplexMatrix rho) {
    QuantumState s(std::move(layout), StateForm::Density, std::move(rho));
    require(std::abs(s.weight() - 1.0) <= kNormTol, ErrorCode::NotNormalized,
            "trace " + std::to_string(s.weight()));
    require(s.data_.is_hermitian(kHermitianTol), ErrorCode::NotHermitian, "density matrix");
    const auto eig = eig_hermitian(s.data_);
    require(eig.values.front() >= -kSpectrumTol, ErrorCode::InvalidState,
            "negative eigenvalue " + std::to_string(eig.values.front()));
    return s;
}

QuantumState QuantumState::unchecked(SubsystemLayout layout, StateForm form, ComplexMatrix data) {
    return QuantumState(std::move(layout), form, std::move(data));
}

double QuantumState::weight() const {
    if (form_ == StateForm::Density) return data_.trace().real();
    double s = 0.0;
    for (const auto& z : data_.data()) s += std::norm(z);
    return s;
}

QuantumState QuantumState::to_density() const {
    if (form_ == StateForm::Density) return *this;
    return QuantumState(layout_, StateForm::Density, multiply_adjoint(data_, data_));
}

QuantumState partial_trace(const QuantumState& state, std::span<const std::string> keep) {
    const auto& layout = state.layout();
    std::vector<bool> mask(layout.size(), false);
    for (const auto& label : keep) mask[layout.position(label)] = true;

    std::vector<std::size_t> dims;
    std::vector<std::string> labels;
    for (std::size_t s = 0; s < layout.size(); ++s)
        if (mask[s]) {
            dims.push_back(layout.dims()[s]);
            labels.push_back(layout.labels()[s]);
        }
    SubsystemLayout reduced(std::move(dims), std::move(labels));

    const auto rho = state.to_density();
    const std::size_t dk = reduced.total_dimension();
    ComplexMatrix out(dk, dk);
    // std::vector<bool> has no contiguous storage.
    std::unique_ptr<bool[]> flags(new bool[mask.size()]);
    for (std::size_t i = 0; i < mask.size(); ++i) flags[i] = mask[i];
    kernels::parallel::partial_trace(layout.dims(), std::span<const bool>(flags.get(), mask.size()),
                                     rho.data().data(), out.data());
    return QuantumState::unchecked(std::move(reduced), StateForm::Density, std::move(out));
}

QuantumState partial_trace(const QuantumState& state, std::initializer_list<std::string> keep) {
    std::vector<std::string> labels(keep);
    return partial_trace(state, std::span<const std::string>(labels));
}

double fidelity(const QuantumState& state, const QuantumState& target) {
    require(target.is_pure(), ErrorCode::InvalidArgument, "fidelity target must be a pure state");
    require(state.dimension() == target.dimension(), ErrorCode::DimensionMismatch,
            "state dimension " + std::to_string(state.dimension()) + " vs target " +
                std::to_string(target.dimension()));
    const auto& t = target.data();
    double value = 0.0;
    if (state.is_pure()) {
        cplx overlap = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) overlap += std::conj(t(i, 0)) * state.data()(i, 0);
        value = std::norm(overlap);
    } else {
        const auto& rho = state.data();
        cplx acc = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            cplx row = 0.0;
            for (std::size_t j = 0; j < t.rows(); ++j) row += rho(i, j) * t(j, 0);
            acc += std::conj(t(i, 0)) * row;
        }
        value = acc.real();
    }
    require(value >= -kNormTol && value <= 1.0 + kNormTol, ErrorCode::InvalidState,
            "fidelity " + std::to_string(value) + " outside [0,1]");
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace zenoguard::linalg
