#pragma once

#include <stdexcept>
#include <string>

namespace qkm {

enum class errc {
  not_gcm,
  not_symmetrizable,
  singular_cartan_matrix,
  rank_mismatch,
  not_dominant,
  not_finite_type,
  depth_too_small,
  out_of_depth,
  datum_mismatch,
  not_singular,
  generation_failure,
  non_unique_solution,
  no_solution,
  exponent_not_in_lattice,
  golden_mismatch,
  parse_error,
  internal,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::not_gcm: return "NotGCM";
    case errc::not_symmetrizable: return "NotSymmetrizable";
    case errc::singular_cartan_matrix: return "SingularCartanMatrix";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::not_dominant: return "NotDominant";
    case errc::not_finite_type: return "NotFiniteType";
    case errc::depth_too_small: return "DepthTooSmallForRequest";
    case errc::out_of_depth: return "OutOfDepth";
    case errc::datum_mismatch: return "DatumMismatch";
    case errc::not_singular: return "NotSingular";
    case errc::generation_failure: return "GenerationFailure";
    case errc::non_unique_solution: return "NonUniqueSolution";
    case errc::no_solution: return "NoSolution";
    case errc::exponent_not_in_lattice: return "ExponentNotInLattice";
    case errc::golden_mismatch: return "GoldenMismatch";
    case errc::parse_error: return "ParseError";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

// All library failures are thrown as Error; name() is stable and is what the
// CLI prints verbatim before exiting with status 1.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qkm
