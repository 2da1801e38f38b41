#include "dnls/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dnls {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

double to_double(const std::string& s, const std::string& ctx) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || !std::isfinite(v))
    throw DataError("CSV: bad number '" + s + "' in " + ctx);
  return v;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Rows of doubles under a known header; tolerates trailing blank lines.
std::vector<rvec> read_rows(const std::string& path, std::size_t min_cols,
                            std::string* header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  *header = line;
  std::vector<rvec> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() < min_cols)
      throw DataError(path + ": expected >=" + std::to_string(min_cols) +
                      " columns, got " + std::to_string(fields.size()));
    rvec row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
      row[i] = to_double(fields[i], path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return rows;
}

// The first column must be uniform with a power-of-two count; returns spacing.
double check_uniform(const std::vector<rvec>& rows, const std::string& path) {
  const std::size_t n = rows.size();
  if (n < 2 || (n & (n - 1)) != 0)
    throw DataError(path + ": row count " + std::to_string(n) +
                    " is not a power of two");
  const double d = rows[1][0] - rows[0][0];
  for (std::size_t j = 1; j < n; ++j) {
    double expect = rows[0][0] + static_cast<double>(j) * d;
    if (std::abs(rows[j][0] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw DataError(path + ": non-uniform first column at row " +
                      std::to_string(j));
  }
  return d;
}

}  // namespace

Potential read_potential_csv(const std::string& path) {
  std::string header;
  auto rows = read_rows(path, 3, &header);
  const double dx = check_uniform(rows, path);
  const std::size_t N = rows.size();
  const double L = 0.5 * static_cast<double>(N) * dx;
  if (std::abs(rows[0][0] + L) > 1e-9 * L)
    throw DataError(path + ": x grid must start at -N*dx/2");
  Potential p;
  p.grid = SpatialGrid(L, N);
  p.q.resize(N);
  for (std::size_t j = 0; j < N; ++j) p.q[j] = cxd(rows[j][1], rows[j][2]);
  return p;
}

void write_potential_csv(const std::string& path, const Potential& p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "x,re_q,im_q\n";
  for (std::size_t j = 0; j < p.grid.N; ++j)
    out << fmt17(p.grid.x(j)) << ',' << fmt17(p.q[j].real()) << ','
        << fmt17(p.q[j].imag()) << '\n';
}

ScatteringData read_scattering_csv(const std::string& path) {
  std::string header;
  auto rows = read_rows(path, 3, &header);
  const double dl = check_uniform(rows, path);
  const std::size_t M = rows.size();
  ScatteringData d;
  d.grid = SpectralGrid(M, dl);
  if (std::abs(rows[M / 2][0]) > 1e-9)
    throw DataError(path + ": lambda grid must be symmetric about 0");
  const bool full = rows[0].size() >= 7;
  d.rho.resize(M);
  if (full) d.alpha.resize(M), d.beta.resize(M);
  for (std::size_t k = 0; k < M; ++k) {
    d.rho[k] = cxd(rows[k][1], rows[k][2]);
    if (full) {
      d.alpha[k] = cxd(rows[k][3], rows[k][4]);
      d.beta[k] = cxd(rows[k][5], rows[k][6]);
    }
  }
  return d;
}

void write_scattering_csv(const std::string& path, const ScatteringData& d) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  const bool full = d.has_transition();
  out << (full ? "lambda,re_rho,im_rho,re_alpha,im_alpha,re_beta,im_beta"
               : "lambda,re_rho,im_rho")
      << '\n';
  for (std::size_t k = 0; k < d.grid.M; ++k) {
    out << fmt17(d.grid.lambda(k)) << ',' << fmt17(d.rho[k].real()) << ','
        << fmt17(d.rho[k].imag());
    if (full)
      out << ',' << fmt17(d.alpha[k].real()) << ',' << fmt17(d.alpha[k].imag())
          << ',' << fmt17(d.beta[k].real()) << ',' << fmt17(d.beta[k].imag());
    out << '\n';
  }
}

std::string sidecar_path(const std::string& csv_path) {
  if (csv_path.size() > 4 && csv_path.ends_with(".csv"))
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  return csv_path + ".json";
}

void write_sidecar(const std::string& csv_path, const nlohmann::json& report) {
  const std::string path = sidecar_path(csv_path);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << report.dump(2) << '\n';
}

rvec parse_range(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw DataError("range: expected lo:hi:n, got " + spec);
  const double lo = to_double(parts[0], "range");
  const double hi = to_double(parts[1], "range");
  const long n = std::strtol(parts[2].c_str(), nullptr, 10);
  if (n < 1 || hi < lo) throw DataError("range: bad bounds in " + spec);
  rvec xs(static_cast<std::size_t>(n));
  if (n == 1) {
    xs[0] = lo;
    return xs;
  }
  const double d = (hi - lo) / static_cast<double>(n - 1);
  for (long j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = lo + d * j;
  return xs;
}

}  // namespace dnls
