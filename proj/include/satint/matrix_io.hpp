#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace satint {

/// Whitespace-separated rows, one matrix row per line. `#` comments and
/// blank lines are skipped. Throws ConfigError on ragged rows, non-numeric
/// or non-finite tokens, or an empty matrix.
Eigen::MatrixXd read_matrix(std::istream& in, const std::string& source);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace satint
