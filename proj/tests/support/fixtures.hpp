#pragma once

#include <filesystem>
#include <string>

#include "mmhar/data_types.hpp"
#include "mmhar/tensor.hpp"

namespace mmhar::testing {

/// Writes an uncompressed MATLAB v5 file holding one named double matrix
/// (column-major, as MATLAB stores it). Independent of the production
/// reader.
void write_mat5_matrix(const std::string& path, const std::string& var_name,
                       const Tensor& row_major);

/// Writes an MMAct-style sensor CSV: one "x,y,z" row per step.
void write_sensor_csv(const std::string& path, std::int64_t steps, double scale);

/// Builds a small UTD-MHAD fixture tree: Inertial/*.mat + RGB/*.avi for
/// every (action, subject, trial) triple in [1..actions] x subjects x
/// [1..trials].
void build_utd_fixture(const std::filesystem::path& root, int actions,
                       const std::vector<int>& subjects, int trials);

/// Builds an MMAct fixture tree with the four sensor stream dirs and a
/// video dir.
void build_mmact_fixture(const std::filesystem::path& root,
                         const std::vector<std::string>& actions,
                         const std::vector<int>& subjects, bool with_video = true);

std::filesystem::path fresh_temp_dir(const std::string& tag);

}  // namespace mmhar::testing
