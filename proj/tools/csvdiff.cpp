// csvdiff: numeric comparison of two CSV files produced by the dnls CLI.
//
// Headers must match exactly; every numeric cell must satisfy
//   |a - b| <= tol_abs + tol_rel * max(|a|, |b|).
// Exit 0 when the files agree, 1 on any violation (worst offender printed),
// 2 on usage or parse problems. With both tolerances at 0 this is an exact
// (bitwise, thanks to the %.17g writers) comparison.
//
//   csvdiff a.csv b.csv [--abs 0] [--rel 0] [--quiet]

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Table {
  std::string header;
  std::vector<std::vector<double>> rows;
};

bool load(const std::string& path, Table& t, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open " + path;
    return false;
  }
  if (!std::getline(in, t.header)) {
    err = path + ": empty file";
    return false;
  }
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        err = path + ":" + std::to_string(lineno) + ": non-numeric cell '" +
              cell + "'";
        return false;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numeric CSV comparison with tolerances"};
  std::string path_a, path_b;
  double tol_abs = 0.0, tol_rel = 0.0;
  bool quiet = false;
  app.add_option("a", path_a, "first CSV")->required();
  app.add_option("b", path_b, "second CSV")->required();
  app.add_option("--abs", tol_abs, "absolute tolerance (default 0)");
  app.add_option("--rel", tol_rel, "relative tolerance (default 0)");
  app.add_flag("--quiet", quiet, "suppress the summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Table ta, tb;
  std::string err;
  if (!load(path_a, ta, err) || !load(path_b, tb, err)) {
    std::fprintf(stderr, "csvdiff: %s\n", err.c_str());
    return 2;
  }
  if (ta.header != tb.header) {
    std::fprintf(stderr, "csvdiff: header mismatch\n  %s\n  %s\n",
                 ta.header.c_str(), tb.header.c_str());
    return 1;
  }
  if (ta.rows.size() != tb.rows.size()) {
    std::fprintf(stderr, "csvdiff: row count %zu vs %zu\n", ta.rows.size(),
                 tb.rows.size());
    return 1;
  }

  std::size_t violations = 0, cells = 0;
  double worst = 0.0;
  std::size_t worst_row = 0, worst_col = 0;
  for (std::size_t r = 0; r < ta.rows.size(); ++r) {
    if (ta.rows[r].size() != tb.rows[r].size()) {
      std::fprintf(stderr, "csvdiff: row %zu: %zu vs %zu columns\n", r + 2,
                   ta.rows[r].size(), tb.rows[r].size());
      return 1;
    }
    for (std::size_t c = 0; c < ta.rows[r].size(); ++c) {
      ++cells;
      const double a = ta.rows[r][c], b = tb.rows[r][c];
      const double d = std::abs(a - b);
      const double allow = tol_abs + tol_rel * std::max(std::abs(a),
                                                        std::abs(b));
      const double excess = d - allow;
      if (excess > 0.0) {
        ++violations;
        if (excess > worst) {
          worst = excess;
          worst_row = r + 2;  // 1-based, counting the header line
          worst_col = c + 1;
        }
      }
    }
  }

  if (violations > 0) {
    std::fprintf(stderr,
                 "csvdiff: %zu of %zu cells differ beyond tolerance; worst "
                 "at line %zu, column %zu (excess %.6e)\n",
                 violations, cells, worst_row, worst_col, worst);
    return 1;
  }
  if (!quiet)
    std::printf("csvdiff: %zu cells match (abs %.3e, rel %.3e)\n", cells,
                tol_abs, tol_rel);
  return 0;
}
