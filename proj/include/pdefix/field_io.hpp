#pragma once

#include <filesystem>
#include <string>

#include "pdefix/field.hpp"
#include "pdefix/picard.hpp"
#include "pdefix/verifier.hpp"

namespace pdefix {

/// "# pdefix-field v1 dim=<d> grid=<g1,..> components=<N>", then
/// "x1,..,xd,u0,..", one row per grid point in flat order, 17 significant
/// digits.
std::string format_field_csv(const SpectralField& field);
void write_field_csv(const SpectralField& field, const std::filesystem::path& path);
/// Throws IoError or SyntaxError for malformed content.
SpectralField parse_field_csv(std::string_view text);
SpectralField read_field_csv(const std::filesystem::path& path);

/// Plain (P2) 16-bit PGM of one component of a 2D field: rows follow the
/// first axis, columns the second. Linear min -> 0, max -> 65535; a flat
/// field maps to 32768.
std::string format_pgm(const SpectralField& field, int component);
void write_pgm(const SpectralField& field, int component, const std::filesystem::path& path);

/// iter,update_norm,residual_norm,contraction_estimate
std::string format_report_csv(const ConvergenceTrace& trace);
void write_report_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);

/// equation,linf,l2 rows followed by "overall,<max>,".
std::string format_residual_csv(const ResidualReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pdefix
