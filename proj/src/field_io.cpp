#include "microlocal/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "microlocal/error.hpp"

namespace microlocal {
namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

void put_double(std::ostream& out, double d) {
  const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(d));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

double get_double(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  require(in.gcount() == 8, errors::kFormatError, "truncated MFLD1 sample data");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  return std::bit_cast<double>(to_le(bits));
}

std::string header_value(std::istream& in, const std::string& key) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errors::kFormatError,
          "MFLD1 header ends before " + key);
  const std::string prefix = key + "=";
  require(line.rfind(prefix, 0) == 0, errors::kFormatError,
          "expected '" + prefix + "' in MFLD1 header, got '" + line + "'");
  return line.substr(prefix.size());
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_same_v<T, double>)
      value = std::stod(text, &used);
    else
      value = static_cast<T>(std::stol(text, &used));
    require(used == text.size(), errors::kFormatError, "trailing characters in " + key);
    return value;
  } catch (const std::logic_error&) {
    fail(errors::kFormatError, "bad numeric value for " + key + ": '" + text + "'");
  }
}

}  // namespace

void write_field(std::ostream& out, const GridField& u) {
  char extent[64];
  std::snprintf(extent, sizeof extent, "%.17g", u.spec().extent);
  out << "MFLD1\n"
      << "dim=" << u.spec().dim << "\n"
      << "samples=" << u.spec().samples << "\n"
      << "extent=" << extent << "\n"
      << "channels=" << u.channels() << "\n\n";
  for (const cplx& v : u.samples()) {
    put_double(out, v.real());
    put_double(out, v.imag());
  }
  require(static_cast<bool>(out), errors::kFormatError, "failed writing MFLD1 data");
}

GridField read_field(std::istream& in) {
  std::string line;
  require(std::getline(in, line) && line == "MFLD1", errors::kFormatError,
          "missing MFLD1 magic line");
  const int dim = parse_number<int>(header_value(in, "dim"), "dim");
  const int samples = parse_number<int>(header_value(in, "samples"), "samples");
  const double extent = parse_number<double>(header_value(in, "extent"), "extent");
  const int channels = parse_number<int>(header_value(in, "channels"), "channels");
  require(std::getline(in, line) && line.empty(), errors::kFormatError,
          "MFLD1 header must end with a blank line");
  require(channels >= 1, errors::kFormatError, "channels must be positive");
  const GridSpec spec = GridSpec::make(dim, samples, extent);
  std::vector<cplx> data(spec.size() * channels);
  for (auto& v : data) {
    const double re = get_double(in);
    const double im = get_double(in);
    v = cplx(re, im);
  }
  return GridField(spec, channels, std::move(data));
}

void save_field(const std::string& path, const GridField& u) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), errors::kFormatError, "cannot open " + path + " for writing");
  write_field(out, u);
}

GridField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), errors::kFormatError, "cannot open " + path);
  return read_field(in);
}

}  // namespace microlocal
