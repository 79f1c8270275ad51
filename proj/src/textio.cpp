#include "textio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tme {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot_csv(const std::filesystem::path& path, const FieldState& state,
                        const Grid& grid) {
  std::ostringstream os;
  const bool two_d = grid.domain.dimension == 2;
  os << (two_d ? "x,y" : "x") << ",S,R,D,P,A";
  if (state.has_c()) os << ",c";
  os << "\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const size_t id = grid.idx(i, j);
      os << fmt17(grid.x(i));
      if (two_d) os << "," << fmt17(grid.y(j));
      os << "," << fmt17(state.S[id]) << "," << fmt17(state.R[id]) << "," << fmt17(state.D[id])
         << "," << fmt17(state.P[id]) << "," << fmt17(state.A[id]);
      if (state.has_c()) os << "," << fmt17(state.c[id]);
      os << "\n";
    }
  }
  write_text_file(path, os.str());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) {
    os << header[i] << (i + 1 < header.size() ? "," : "");
  }
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      os << row[i] << (i + 1 < row.size() ? "," : "");
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace tme
