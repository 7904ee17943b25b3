#pragma once

// JSON bundles (schema version "v1"). Complex entries are [re, im] pairs and
// matrices are arrays of rows. Doubles are written in shortest round-trip form,
// so write/read is bit-identical for finite values.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jcs/agler.hpp"
#include "jcs/dilation.hpp"
#include "jcs/krein.hpp"
#include "jcs/series.hpp"
#include "jcs/system.hpp"

namespace jcs::io {

inline constexpr const char* kVersion = "v1";

class FormatError : public Error {
public:
  using Error::Error;
};

struct SystemBundle {
  MultiparametricSystem system;
  std::optional<CanonicalSymmetry> j;
  std::optional<std::uint64_t> seed;
};

std::string write_system(const SystemBundle& bundle);
SystemBundle read_system(const std::string& text);

/// Entries [multi-index, real matrix, imag matrix]; a geometric tail is kept when present.
std::string write_series(const TruncatedOperatorSeries& series);
TruncatedOperatorSeries read_series(const std::string& text);

std::string write_decomposition(const AglerDecomposition& dec);
AglerDecomposition read_decomposition(const std::string& text);

struct DilationBundle {
  SystemBundle dilation;   ///< alpha_tilde with its J
  int x_offset = 0;
  int k0_dim = 0;
  int aux_dim = 0;
  double tol = 0.0;
  std::map<std::string, double> defects;
  std::vector<std::string> failed;
};

DilationBundle to_bundle(const DilationResult& res);
std::string write_dilation(const DilationBundle& bundle);
DilationBundle read_dilation(const std::string& text);

/// Whole-file helpers; throw FormatError on I/O failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace jcs::io
