// pdefix command-line front end. Uses only the C interface of libpdefix.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdefix/pdefix.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;

struct ProblemDeleter {
  void operator()(pdefix_problem* p) const { pdefix_problem_free(p); }
};
struct ResultDeleter {
  void operator()(pdefix_result* r) const { pdefix_result_free(r); }
};
struct FieldDeleter {
  void operator()(pdefix_field* f) const { pdefix_field_free(f); }
};
using ProblemPtr = std::unique_ptr<pdefix_problem, ProblemDeleter>;
using ResultPtr = std::unique_ptr<pdefix_result, ResultDeleter>;
using FieldPtr = std::unique_ptr<pdefix_field, FieldDeleter>;

struct RunFlags {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<double> damping;
  std::string grid;
  std::string out = ".";
  bool pgm = false;
  std::optional<double> forcing_scale;
};

int report_error(const char* context) {
  std::cerr << "pdefix: " << context << ": " << pdefix_last_error() << '\n';
  return kExitUsage;
}

std::optional<std::vector<int>> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

// Linf distance between the solution and the builtin's exact field.
std::optional<double> exact_error(const pdefix_problem* problem, const pdefix_field* solution) {
  if (!pdefix_problem_has_exact(problem)) return std::nullopt;
  pdefix_field* raw = nullptr;
  if (pdefix_problem_exact(problem, -1.0, &raw) != PDEFIX_OK) return std::nullopt;
  FieldPtr exact(raw);
  double err = 0.0;
  const std::size_t n = pdefix_field_points(solution);
  for (int c = 0; c < pdefix_field_components(solution); ++c) {
    const double* a = pdefix_field_values(solution, c);
    const double* b = pdefix_field_values(exact.get(), c);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(a[i] - b[i]));
  }
  return err;
}

int run_solve(ProblemPtr problem, const RunFlags& flags) {
  if (!flags.grid.empty()) {
    const auto points = parse_grid(flags.grid);
    if (!points) {
      std::cerr << "pdefix: --grid expects g1[,g2[,g3]], got '" << flags.grid << "'\n";
      return kExitUsage;
    }
    if (pdefix_problem_set_grid(problem.get(), points->data(), static_cast<int>(points->size())) != PDEFIX_OK) {
      return report_error("--grid");
    }
  }
  if (flags.forcing_scale &&
      pdefix_problem_scale_forcing(problem.get(), *flags.forcing_scale) != PDEFIX_OK) {
    return report_error("--forcing-scale");
  }

  pdefix_solver_options opts;
  pdefix_solver_options_default(&opts);
  if (flags.tol) opts.tol = *flags.tol;
  if (flags.max_iter) opts.max_iter = *flags.max_iter;
  if (flags.damping) opts.damping = *flags.damping;

  pdefix_result* raw = nullptr;
  const pdefix_status status = pdefix_solve(problem.get(), &opts, &raw);
  if (status == PDEFIX_INVALID_ARGUMENT) return report_error("options");
  if (status != PDEFIX_OK) {
    std::cerr << "pdefix: solve failed: " << pdefix_last_error() << '\n';
    return kExitSolver;
  }
  ResultPtr result(raw);
  const pdefix_field* solution = pdefix_result_field(result.get());

  std::error_code ec;
  std::filesystem::create_directories(flags.out, ec);
  if (ec) {
    std::cerr << "pdefix: cannot create output directory '" << flags.out << "': " << ec.message() << '\n';
    return kExitUsage;
  }
  const std::filesystem::path out(flags.out);
  if (pdefix_field_write_csv(solution, (out / "solution.csv").string().c_str()) != PDEFIX_OK) {
    return report_error("writing solution");
  }
  if (pdefix_result_write_report(result.get(), (out / "report.csv").string().c_str()) != PDEFIX_OK) {
    return report_error("writing report");
  }
  if (flags.pgm) {
    if (pdefix_field_dim(solution) != 2) {
      std::cerr << "pdefix: --pgm ignored, images need a 2D field\n";
    } else {
      for (int c = 0; c < pdefix_field_components(solution); ++c) {
        const auto path = out / ("u" + std::to_string(c) + ".pgm");
        if (pdefix_field_write_pgm(solution, c, path.string().c_str()) != PDEFIX_OK) {
          return report_error("writing image");
        }
      }
    }
  }

  const int iterations = pdefix_result_iterations(result.get());
  pdefix_iteration last{};
  pdefix_result_iteration(result.get(), iterations - 1, &last);
  std::cerr << (pdefix_problem_is_evolution(problem.get()) ? "slabs: " : "iterations: ") << iterations
            << "  final update: " << last.update_norm << "  residual: " << last.residual_norm;
  int has_q = 0;
  double q = 0.0;
  if (iterations >= 3 && pdefix_result_contraction(result.get(), &has_q, &q) == PDEFIX_OK && has_q) {
    std::cerr << "  contraction: " << q;
  }
  if (const auto err = exact_error(problem.get(), solution)) std::cerr << "  error vs exact: " << *err;
  std::cerr << '\n';
  return kExitOk;
}

int run_verify(const std::string& problem_path, const std::string& solution_path) {
  pdefix_problem* raw_problem = nullptr;
  if (pdefix_problem_load(problem_path.c_str(), &raw_problem) != PDEFIX_OK) return report_error("loading problem");
  ProblemPtr problem(raw_problem);
  pdefix_field* raw_field = nullptr;
  if (pdefix_field_read_csv(solution_path.c_str(), &raw_field) != PDEFIX_OK) return report_error("loading solution");
  FieldPtr field(raw_field);
  pdefix_residual_report report{};
  if (pdefix_verify(problem.get(), field.get(), &report) != PDEFIX_OK) return report_error("verify");

  std::printf("equation,linf,l2\n");
  for (int k = 0; k < report.equations; ++k) {
    std::printf("%d,%.16e,%.16e\n", k, report.linf[k], report.l2[k]);
  }
  std::printf("overall,%.16e,\n", report.overall_max);
  return kExitOk;
}

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--tol", flags.tol, "Relative update tolerance");
  cmd->add_option("--max-iter", flags.max_iter, "Maximum Picard iterations");
  cmd->add_option("--damping", flags.damping, "Damping theta in (0, 1]");
  cmd->add_option("--grid", flags.grid, "Grid override g1[,g2[,g3]]");
  cmd->add_option("--out", flags.out, "Output directory (default: current)");
  cmd->add_flag("--pgm", flags.pgm, "Also write PGM images of 2D fields");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdefix: fixed-point solver for semilinear PDE systems on periodic grids"};
  app.require_subcommand(1);

  RunFlags solve_flags;
  std::string problem_file;
  auto* solve = app.add_subcommand("solve", "Solve a problem file");
  solve->add_option("file", problem_file, "Problem file (.pde)")->required();
  add_run_flags(solve, solve_flags);

  RunFlags builtin_flags;
  std::string builtin_name;
  auto* builtin = app.add_subcommand("builtin", "Solve a built-in problem");
  builtin->add_option("name", builtin_name,
                      "heat1d | cubic1d | burgers1d | burgers1d-evolution | taylor-green-2d")
      ->required();
  add_run_flags(builtin, builtin_flags);
  builtin->add_option("--forcing-scale", builtin_flags.forcing_scale, "Multiply the forcing by R");

  std::string verify_problem, verify_solution;
  auto* verify = app.add_subcommand("verify", "Print the differential residual of a solution as CSV");
  verify->add_option("file", verify_problem, "Problem file (.pde)")->required();
  verify->add_option("solution", verify_solution, "solution.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*solve) {
    pdefix_problem* raw = nullptr;
    if (pdefix_problem_load(problem_file.c_str(), &raw) != PDEFIX_OK) return report_error("loading problem");
    return run_solve(ProblemPtr(raw), solve_flags);
  }
  if (*builtin) {
    pdefix_problem* raw = nullptr;
    if (pdefix_problem_builtin(builtin_name.c_str(), &raw) != PDEFIX_OK) return report_error("builtin");
    return run_solve(ProblemPtr(raw), builtin_flags);
  }
  return run_verify(verify_problem, verify_solution);
}
