#pragma once

#include <string>

#include <Eigen/Dense>

namespace tamp {

// Binary layout: "TAMP0001", u64 rows, u64 cols (little endian), then
// row-major little-endian doubles.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace tamp
