#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace fastlight::detail {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(std::vector<std::complex<double>>& data, FftDirection direction) {
    std::lock_guard lock(planner_mutex());
    auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), buffer, buffer,
                             direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> data,
                                      FftDirection direction) {
  if (data.empty()) return data;
  const Plan plan(data, direction);
  plan.execute();
  return data;
}

}  // namespace fastlight::detail
