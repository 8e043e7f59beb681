#pragma once

#include <exception>
#include <mutex>
#include <string_view>

namespace tactics {

// Selects between the OpenMP kernels and their serial references. Both paths
// produce bit-identical results; the serial one exists for testing and for
// environments where nested threading is undesirable.
enum class Exec { kSerial, kParallel };

std::string_view to_string(Exec e);

// Number of threads the OpenMP runtime would use for a parallel region.
int parallel_threads();

// Collects the first exception thrown inside an OpenMP region so it can be
// rethrown on the calling thread once the region joins.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!err_) err_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr err_;
};

}  // namespace tactics
