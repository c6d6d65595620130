#include "qphase/instance_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qphase/errors.hpp"

namespace qphase {

namespace fs = std::filesystem;

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& token, const fs::path& path, std::size_t line) {
  const std::string t = trim(token);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw IoError(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line, t));
  return v;
}

} // namespace

std::string format_real(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

void write_matrix_csv(const fs::path& path, const Matrix& values) {
  auto out = open_for_write(path);
  std::string line;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c)
        line += ',';
      line += format_real(values(r, c));
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_rows_csv(const fs::path& path, const std::vector<Vector>& rows) {
  auto out = open_for_write(path);
  std::string line;
  for (const auto& row : rows) {
    line.clear();
    for (Eigen::Index c = 0; c < row.size(); ++c) {
      if (c)
        line += ',';
      line += format_real(row[c]);
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  std::vector<double> data;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index count = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(parse_real(cell, path, line_no));
      ++count;
    }
    if (cols < 0)
      cols = count;
    else if (count != cols)
      throw IoError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), line_no,
                                cols, count));
    ++rows;
  }
  if (rows == 0)
    throw IoError("'" + path.string() + "' contains no rows");
  return Eigen::Map<Matrix>(data.data(), rows, cols);
}

void write_key_values(const fs::path& path, const KeyValues& values) {
  auto out = open_for_write(path);
  for (const auto& [key, value] : values)
    out << key << '=' << value << '\n';
  finish(out, path);
}

KeyValues read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  KeyValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw IoError(fmt::format("{}:{}: empty key", path.string(), line_no));
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

void save_instance(const fs::path& dir, const ProblemInstance& inst, std::uint64_t seed) {
  validate(inst);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  write_matrix_csv(dir / "A.csv", inst.sensing);
  write_matrix_csv(dir / "y.csv", inst.observations);
  if (inst.theta_star)
    write_matrix_csv(dir / "theta_star.csv", *inst.theta_star);

  KeyValues meta{{"m", std::to_string(inst.m())},
                 {"p", std::to_string(inst.p())},
                 {"seed", std::to_string(seed)}};
  meta["s_star"] = inst.s_star ? std::to_string(*inst.s_star) : "";
  meta["sigma"] = inst.sigma ? format_real(*inst.sigma) : "";
  write_key_values(dir / "meta.txt", meta);
}

ProblemInstance load_instance(const fs::path& dir) {
  ProblemInstance inst;
  inst.sensing = read_matrix_csv(dir / "A.csv");
  const Matrix y = read_matrix_csv(dir / "y.csv");
  if (y.cols() != 1)
    throw IoError("y.csv must have exactly one column");
  inst.observations = y.col(0);

  if (fs::exists(dir / "theta_star.csv")) {
    const Matrix t = read_matrix_csv(dir / "theta_star.csv");
    if (t.cols() != 1)
      throw IoError("theta_star.csv must have exactly one column");
    inst.theta_star = Vector(t.col(0));
  }
  if (fs::exists(dir / "meta.txt")) {
    const auto meta = read_key_values(dir / "meta.txt");
    if (auto it = meta.find("sigma"); it != meta.end() && !it->second.empty())
      inst.sigma = parse_real(it->second, dir / "meta.txt", 0);
    if (auto it = meta.find("s_star"); it != meta.end() && !it->second.empty())
      inst.s_star = static_cast<Eigen::Index>(parse_real(it->second, dir / "meta.txt", 0));
    for (const char* key : {"m", "p"}) {
      auto it = meta.find(key);
      if (it == meta.end())
        continue;
      const auto expected = static_cast<Eigen::Index>(parse_real(it->second, dir / "meta.txt", 0));
      const auto actual = std::string(key) == "m" ? inst.m() : inst.p();
      if (expected != actual)
        throw IoError(fmt::format("meta.txt says {}={} but the CSV files give {}", key, expected,
                                  actual));
    }
  }
  try {
    validate(inst);
  } catch (const DomainError& e) {
    throw IoError(std::string("inconsistent instance files: ") + e.what());
  }
  return inst;
}

} // namespace qphase
