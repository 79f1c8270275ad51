#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "solver.hpp"

namespace tme {

// 17-significant-digit decimal rendering; the only numeric interchange format.
std::string fmt17(double v);

// Columnar snapshot export: header x[,y],S,R,D,P,A[,c], one row per cell.
void write_snapshot_csv(const std::filesystem::path& path, const FieldState& state,
                        const Grid& grid);

// Generic CSV writer; every cell already rendered to text.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tme
