#include "chirf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chirf::io {

analytic::PowerSpectrum parse_spectrum(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, double>> entries;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line.substr(0, line.find('#'));
    std::istringstream ls(body);
    long l;
    double c;
    if (!(ls >> l)) {
      std::string rest;
      if (ls.clear(), ls.str(body), ls >> rest)
        throw SpectrumParseError("expected integer multipole", line_no);
      continue;  // blank or comment-only line
    }
    if (!(ls >> c))
      throw SpectrumParseError("missing C_l value", line_no);
    std::string trailing;
    if (ls >> trailing)
      throw SpectrumParseError("trailing tokens after C_l", line_no);
    if (l < 0) throw SpectrumParseError("multipole must be >= 0", line_no);
    if (!(c >= 0.0) || !std::isfinite(c))
      throw SpectrumParseError("C_l must be finite and >= 0", line_no);
    entries.emplace_back(static_cast<int>(l), c);
  }
  if (entries.empty()) throw SpectrumParseError("no spectrum entries", line_no);
  try {
    return analytic::PowerSpectrum(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw SpectrumParseError(e.what(), line_no);
  }
}

analytic::PowerSpectrum read_spectrum(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SpectrumParseError("cannot open spectrum file: " + path, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spectrum(ss.str());
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t spectrum_hash(const analytic::PowerSpectrum& spec) {
  std::string canon;
  for (const auto& [l, c] : spec.entries()) {
    canon += std::to_string(l);
    canon += ':';
    canon += format_double(c);
    canon += ';';
  }
  return fnv1a(canon);
}

std::string render_header(const std::map<std::string, std::string>& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

void export_sample(const fieldsim::SphericalFieldSample& sample,
                   const std::string& path) {
  std::map<std::string, std::string> meta = {
      {"model", "sphere"},
      {"seed", std::to_string(sample.seed())},
      {"stream", std::to_string(sample.stream_id())},
      {"spectrum_hash", hash_hex(spectrum_hash(sample.spectrum()))},
      {"version", kVersion},
  };
  std::string out = render_header(meta);
  out += "l,m,a_lm\n";
  for (const auto& [l, c] : sample.spectrum().entries())
    for (int m = -l; m <= l; ++m)
      out += std::to_string(l) + "," + std::to_string(m) + "," +
             format_double(sample.coeff(l, m)) + "\n";
  write_text_file(path, out);
}

}  // namespace chirf::io
