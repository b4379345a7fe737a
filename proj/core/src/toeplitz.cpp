#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "fraclab/discretization.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {
namespace {

// The FFTW planner is not reentrant; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : data(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* data;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(data); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* data;
};

}  // namespace

struct ToeplitzApplier::Plan {
  int m = 0;  // circulant size 2n
  std::vector<double> symbol;  // real eigenvalues of the circulant, m/2+1 of them
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

ToeplitzApplier::ToeplitzApplier(std::vector<double> first_column)
    : n_(static_cast<Eigen::Index>(first_column.size())), plan_(std::make_unique<Plan>()) {
  if (n_ < 1) throw RangeError("ToeplitzApplier: empty column");
  const int n = static_cast<int>(n_);
  const int m = 2 * n;
  plan_->m = m;

  RealBuffer real(m);
  ComplexBuffer spec(m / 2 + 1);
  {
    std::lock_guard lock(planner_mutex());
    plan_->forward = fftw_plan_dft_r2c_1d(m, real.data, spec.data, FFTW_ESTIMATE);
    plan_->backward = fftw_plan_dft_c2r_1d(m, spec.data, real.data, FFTW_ESTIMATE);
  }

  // Circulant embedding [t_0 .. t_{n-1}, 0, t_{n-1} .. t_1].
  for (int i = 0; i < n; ++i) real.data[i] = first_column[i];
  real.data[n] = 0.0;
  for (int i = 1; i < n; ++i) real.data[m - i] = first_column[i];
  fftw_execute_dft_r2c(plan_->forward, real.data, spec.data);
  plan_->symbol.resize(m / 2 + 1);
  for (int k = 0; k <= m / 2; ++k) plan_->symbol[k] = spec.data[k][0];
}

ToeplitzApplier::~ToeplitzApplier() = default;
ToeplitzApplier::ToeplitzApplier(ToeplitzApplier&&) noexcept = default;
ToeplitzApplier& ToeplitzApplier::operator=(ToeplitzApplier&&) noexcept = default;

ToeplitzApplier ToeplitzApplier::for_operator(const FracOperator& op) {
  if (op.grid().dim() != 1) throw RangeError("ToeplitzApplier: only 1-D operators are Toeplitz");
  const auto& a = op.matrix();
  std::vector<double> column(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) column[i] = a(i, 0);
  return ToeplitzApplier(std::move(column));
}

Eigen::VectorXd ToeplitzApplier::apply(const Eigen::VectorXd& u) const {
  if (u.size() != n_) throw ShapeError("ToeplitzApplier: size mismatch");
  const int m = plan_->m;
  const int n = static_cast<int>(n_);
  RealBuffer real(m);
  ComplexBuffer spec(m / 2 + 1);
  for (int i = 0; i < n; ++i) real.data[i] = u[i];
  for (int i = n; i < m; ++i) real.data[i] = 0.0;
  fftw_execute_dft_r2c(plan_->forward, real.data, spec.data);
  for (int k = 0; k <= m / 2; ++k) {
    spec.data[k][0] *= plan_->symbol[k];
    spec.data[k][1] *= plan_->symbol[k];
  }
  fftw_execute_dft_c2r(plan_->backward, spec.data, real.data);
  Eigen::VectorXd out(n);
  const double inv_m = 1.0 / m;
  for (int i = 0; i < n; ++i) out[i] = real.data[i] * inv_m;
  return out;
}

}  // namespace fraclab
