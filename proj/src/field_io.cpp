#include "pdefix/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdefix/errors.hpp"

namespace pdefix {

namespace {

void append_scientific(std::string& out, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.16e", v);
  out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void malformed(int line, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, "field csv line " + std::to_string(line) + ": " + what);
}

int to_int(std::string_view s, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) malformed(line, "expected integer");
  return v;
}

double to_double(std::string_view s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) malformed(line, "expected number");
  return v;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string format_field_csv(const SpectralField& field) {
  const Grid& grid = field.grid();
  std::string out = "# pdefix-field v1 dim=" + std::to_string(grid.dim()) + " grid=";
  for (int j = 0; j < grid.dim(); ++j) out += (j ? "," : "") + std::to_string(grid.points(j));
  out += " components=" + std::to_string(field.components()) + "\n";
  for (int j = 0; j < grid.dim(); ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  for (int c = 0; c < field.components(); ++c) out += ",u" + std::to_string(c);
  out += '\n';
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto idx = grid.unflatten(p);
    for (int j = 0; j < grid.dim(); ++j) {
      if (j) out += ',';
      append_scientific(out, grid.coordinate(j, idx[j]));
    }
    for (int c = 0; c < field.components(); ++c) {
      out += ',';
      append_scientific(out, field.physical(c)[p]);
    }
    out += '\n';
  }
  return out;
}

void write_field_csv(const SpectralField& field, const std::filesystem::path& path) {
  write_text_file(path, format_field_csv(field));
}

SpectralField parse_field_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) malformed(1, "missing header");

  constexpr std::string_view kMagic = "# pdefix-field v1 ";
  if (lines[0].substr(0, kMagic.size()) != kMagic) malformed(1, "expected '# pdefix-field v1' header");
  int dim = 0, components = 0;
  std::vector<int> points;
  for (auto tok : split(lines[0].substr(kMagic.size()), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) malformed(1, "expected key=value");
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    if (key == "dim") {
      dim = to_int(value, 1);
    } else if (key == "components") {
      components = to_int(value, 1);
    } else if (key == "grid") {
      for (auto g : split(value, ',')) points.push_back(to_int(g, 1));
    } else {
      malformed(1, "unknown header key");
    }
  }
  if (dim < 1 || dim > kMaxDim || static_cast<int>(points.size()) != dim) {
    malformed(1, "inconsistent dim/grid");
  }
  if (components < 1 || components > kMaxComponents) malformed(1, "component count out of range");

  std::size_t total = 1;
  for (int g : points) total *= static_cast<std::size_t>(std::max(g, 0));
  if (lines.size() != total + 2) {
    malformed(static_cast<int>(lines.size()), "expected " + std::to_string(total) + " data rows");
  }
  const std::size_t columns = static_cast<std::size_t>(dim + components);
  if (split(lines[1], ',').size() != columns) malformed(2, "unexpected column header");

  std::vector<double> lengths(dim, 0.0);
  std::vector<double> values(total * components);
  std::vector<std::vector<double>> coords(total);
  for (std::size_t p = 0; p < total; ++p) {
    const int line = static_cast<int>(p) + 3;
    const auto cells = split(lines[p + 2], ',');
    if (cells.size() != columns) malformed(line, "wrong number of columns");
    coords[p].resize(dim);
    for (int j = 0; j < dim; ++j) coords[p][j] = to_double(cells[j], line);
    for (int c = 0; c < components; ++c) values[c * total + p] = to_double(cells[dim + c], line);
  }
  // Axis length from the first off-origin coordinate: x = (L/g) * 1.
  std::size_t stride = 1;
  for (int j = dim - 1; j >= 0; --j) {
    lengths[j] = coords[stride][j] * points[j];
    stride *= static_cast<std::size_t>(points[j]);
  }
  const Grid grid(points, lengths);
  for (std::size_t p = 0; p < total; ++p) {
    const auto idx = grid.unflatten(p);
    for (int j = 0; j < dim; ++j) {
      if (std::abs(coords[p][j] - grid.coordinate(j, idx[j])) > 1e-12 * grid.length(j)) {
        malformed(static_cast<int>(p) + 3, "coordinates do not follow the grid layout");
      }
    }
  }
  return SpectralField::from_physical(grid, components, std::move(values));
}

SpectralField read_field_csv(const std::filesystem::path& path) {
  try {
    return parse_field_csv(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), std::string(e.what()) + " in '" + path.string() + "'");
  }
}

std::string format_pgm(const SpectralField& field, int component) {
  if (field.dim() != 2) throw Error(ErrorCode::InvalidArgument, "PGM output needs a 2D field");
  const auto v = field.physical(component);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double range = *hi - *lo;
  const int rows = field.grid().points(0);
  const int cols = field.grid().points(1);
  std::string out = "P2\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = v[static_cast<std::size_t>(r) * cols + c];
      long level = 32768;
      if (range >= 1e-300) level = std::lround((x - min) / range * 65535.0);
      level = std::clamp(level, 0L, 65535L);
      if (c) out += ' ';
      out += std::to_string(level);
    }
    out += '\n';
  }
  return out;
}

void write_pgm(const SpectralField& field, int component, const std::filesystem::path& path) {
  write_text_file(path, format_pgm(field, component));
}

std::string format_report_csv(const ConvergenceTrace& trace) {
  std::string out = "iter,update_norm,residual_norm,contraction_estimate\n";
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.iteration) + ',';
    append_scientific(out, rec.update_norm);
    out += ',';
    append_scientific(out, rec.residual_norm);
    out += ',';
    if (rec.contraction) append_scientific(out, *rec.contraction);
    out += '\n';
  }
  return out;
}

void write_report_csv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
  write_text_file(path, format_report_csv(trace));
}

std::string format_residual_csv(const ResidualReport& report) {
  std::string out = "equation,linf,l2\n";
  for (std::size_t k = 0; k < report.linf.size(); ++k) {
    out += std::to_string(k) + ',';
    append_scientific(out, report.linf[k]);
    out += ',';
    append_scientific(out, report.l2[k]);
    out += '\n';
  }
  out += "overall,";
  append_scientific(out, report.overall_max);
  out += ",\n";
  return out;
}

}  // namespace pdefix
