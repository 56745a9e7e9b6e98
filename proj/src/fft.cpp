#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace torusdec::fft {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("fftw: plan creation failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

std::vector<cplx> c2c(std::span<const cplx> data, int sign) {
  const std::size_t n = data.size();
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                                   sign, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = data[i].real();
    in[i][1] = data[i].imag();
  }
  plan->execute();
  std::vector<cplx> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

}  // namespace

std::vector<cplx> forward_real(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n == 0) return {};
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(n / 2 + 1);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(data.begin(), data.end(), in.get());
  plan->execute();
  std::vector<cplx> result(n);
  for (std::size_t k = 0; k <= n / 2; ++k) result[k] = {out[k][0], out[k][1]};
  for (std::size_t k = n / 2 + 1; k < n; ++k) result[k] = std::conj(result[n - k]);
  return result;
}

std::vector<cplx> forward(std::span<const cplx> data) { return c2c(data, FFTW_FORWARD); }
std::vector<cplx> inverse(std::span<const cplx> data) { return c2c(data, FFTW_BACKWARD); }

std::vector<cplx> forward_real_2d(std::span<const double> data, std::size_t rows,
                                  std::size_t cols) {
  const std::size_t n = rows * cols;
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                                                   in.get(), out.get(), FFTW_FORWARD,
                                                   FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = data[i];
    in[i][1] = 0.0;
  }
  plan->execute();
  std::vector<cplx> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

std::vector<cplx> inverse_2d(std::span<const cplx> data, std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                                                   in.get(), out.get(), FFTW_BACKWARD,
                                                   FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = data[i].real();
    in[i][1] = data[i].imag();
  }
  plan->execute();
  std::vector<cplx> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_convolve: size mismatch");
  const std::size_t n = a.size();
  auto fa = forward_real(a);
  auto fb = forward_real(b);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  auto back = inverse(fa);
  std::vector<double> result(n);
  for (std::size_t k = 0; k < n; ++k) result[k] = back[k].real() / static_cast<double>(n);
  return result;
}

}  // namespace torusdec::fft
