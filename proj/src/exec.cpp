#include "tactics/exec.hpp"

#include <omp.h>

namespace tactics {

std::string_view to_string(Exec e) { return e == Exec::kSerial ? "serial" : "parallel"; }

int parallel_threads() { return omp_get_max_threads(); }

}  // namespace tactics
