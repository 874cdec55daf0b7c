#ifndef CHIRF_IO_HPP
#define CHIRF_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chirf/analytic.hpp"
#include "chirf/fieldsim.hpp"

namespace chirf::io {

inline constexpr const char* kVersion = "chirf 0.1.0";

// "l C_l" per line; blank lines and '#' comments allowed.  Parse errors
// carry the offending line number.
struct SpectrumParseError : std::runtime_error {
  SpectrumParseError(const std::string& what, int line)
      : std::runtime_error(what), line(line) {}
  int line;
};

analytic::PowerSpectrum read_spectrum(const std::string& path);
analytic::PowerSpectrum parse_spectrum(const std::string& text);

// FNV-1a over a canonical rendering; used to stamp outputs and name
// spectra in export headers.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(std::uint64_t h);
std::uint64_t spectrum_hash(const analytic::PowerSpectrum& spec);

// Key=value lines, sorted by key, that every output embeds.
std::string render_header(const std::map<std::string, std::string>& meta);

// Coefficient dump: header comments (model, seed, stream, spectrum hash),
// then "l,m,a_lm" rows.
void export_sample(const fieldsim::SphericalFieldSample& sample,
                   const std::string& path);

// Deterministic float rendering (shortest round-trip form).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace chirf::io

#endif
