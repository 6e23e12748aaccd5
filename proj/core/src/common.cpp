#include "care/error.hpp"
#include "care/geometry.hpp"

namespace care {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::contract: return "contract";
    case ErrorKind::argument: return "argument";
    case ErrorKind::config: return "config";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::no_consensus: return "no_consensus";
  }
  return "unknown";
}

CorrespondenceSet CorrespondenceSet::select(const std::vector<bool>& mask) const {
  if (mask.size() != pairs.size()) {
    throw Error(ErrorKind::argument, "mask length does not match correspondence count");
  }
  CorrespondenceSet out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (mask[i]) out.pairs.push_back(pairs[i]);
  }
  return out;
}

}  // namespace care
