#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "paraboloid/errors.hpp"
#include "paraboloid/lattice.hpp"

namespace paraboloid {
namespace {

std::string shortest(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

template <typename T>
T parse_token(const std::string& token, std::size_t line_no) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw DomainError("line " + std::to_string(line_no) + ": cannot parse '" + token + "'");
  }
  return value;
}

}  // namespace

void write_sparse_text(std::ostream& out, const LatticeFunction& f) {
  out << "dim " << f.dim() << '\n';
  for (const auto& e : f.entries()) {
    for (std::int64_t c : e.point.coords()) out << c << ' ';
    out << shortest(e.value.real()) << ' ' << shortest(e.value.imag()) << '\n';
  }
}

LatticeFunction read_sparse_text(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;
  std::vector<LatticeFunction::Entry> entries;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;

    if (!have_header) {
      if (tokens.size() != 2 || tokens[0] != "dim") {
        throw DomainError("line " + std::to_string(line_no) + ": expected header 'dim n'");
      }
      dim = parse_token<std::size_t>(tokens[1], line_no);
      if (dim == 0) throw DomainError("dimension must be positive");
      have_header = true;
      continue;
    }
    if (tokens.size() != dim + 2) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 2) + " fields");
    }
    std::vector<std::int64_t> coords(dim);
    for (std::size_t d = 0; d < dim; ++d) coords[d] = parse_token<std::int64_t>(tokens[d], line_no);
    const double re = parse_token<double>(tokens[dim], line_no);
    const double im = parse_token<double>(tokens[dim + 1], line_no);
    entries.push_back({LatticePoint(std::move(coords)), Amplitude(re, im)});
  }
  if (!have_header) throw DomainError("missing 'dim n' header");
  return LatticeFunction::from_entries(dim, std::move(entries));
}

}  // namespace paraboloid
