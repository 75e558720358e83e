#include <atomic>
#include <thread>

#include "objhc/error.hpp"
#include "objhc/parallel.hpp"

namespace objhc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonBinaryTree: return "NonBinaryTree";
    case ErrorKind::MeasureMismatch: return "MeasureMismatch";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::MissingLabels: return "MissingLabels";
  }
  return "Error";
}

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned threads) { g_max_threads.store(threads); }

unsigned max_threads() {
  const unsigned cap = g_max_threads.load();
  if (cap != 0) return cap;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace objhc
