#include <charconv>
#include <fstream>
#include <sstream>

#include "structcov/estimators.hpp"

namespace structcov {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty()) throw InvalidSpec(where + ": '" + cell + "' is not a number");
  return v;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidSpec(path + ":1: empty file");
  const auto header = split_csv(line);

  Dataset d;
  while (d.k < static_cast<int>(header.size()) && header[d.k] == "y_" + std::to_string(d.k + 1)) ++d.k;
  const int nx = static_cast<int>(header.size()) - d.k;
  if (d.k == 0 || nx <= 0 || nx % d.k != 0) {
    throw InvalidSpec(path + ":1: header must be y_1..y_k followed by x_1_1..x_k_q");
  }
  d.q = nx / d.k;
  for (int r = 0; r < d.k; ++r) {
    for (int c = 0; c < d.q; ++c) {
      const std::string want = "x_" + std::to_string(r + 1) + "_" + std::to_string(c + 1);
      if (header[d.k + r * d.q + c] != want) {
        throw InvalidSpec(path + ":1: expected column '" + want + "', found '" + header[d.k + r * d.q + c] + "'");
      }
    }
  }

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) {
      throw InvalidSpec(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    Vector y(d.k);
    Matrix x(d.k, d.q);
    for (int i = 0; i < d.k; ++i) y(i) = parse_number(cells[i], where);
    for (int r = 0; r < d.k; ++r)
      for (int c = 0; c < d.q; ++c) x(r, c) = parse_number(cells[d.k + r * d.q + c], where);
    d.y.push_back(std::move(y));
    d.x.push_back(std::move(x));
  }
  d.validate();
  return d;
}

Dataset read_dataset_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open dataset '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(path + ": " + e.what());
  }
  if (!j.contains("observations") || !j["observations"].is_array()) {
    throw InvalidSpec(path + ": missing 'observations' array");
  }
  Dataset d;
  std::size_t idx = 0;
  for (const auto& obs : j["observations"]) {
    ++idx;
    const std::string where = path + ": observation " + std::to_string(idx);
    try {
      const auto yv = obs.at("y").get<std::vector<double>>();
      Vector y = Eigen::Map<const Vector>(yv.data(), static_cast<Eigen::Index>(yv.size()));
      Matrix x = matrix_from_json(obs.at("x"));
      if (idx == 1) {
        d.k = static_cast<int>(y.size());
        d.q = static_cast<int>(x.cols());
      }
      d.y.push_back(std::move(y));
      d.x.push_back(std::move(x));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidSpec(where + ": " + e.what());
    } catch (const Error& e) {
      throw InvalidSpec(where + ": " + e.what());
    }
  }
  d.validate();
  return d;
}

Dataset read_dataset(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return read_dataset_json(path);
  return read_dataset_csv(path);
}

void write_dataset_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  for (int i = 0; i < d.k; ++i) out << (i ? "," : "") << "y_" << i + 1;
  for (int r = 0; r < d.k; ++r)
    for (int c = 0; c < d.q; ++c) out << ",x_" << r + 1 << "_" << c + 1;
  out << '\n';
  out.precision(17);
  for (std::size_t n = 0; n < d.size(); ++n) {
    for (int i = 0; i < d.k; ++i) out << (i ? "," : "") << d.y[n](i);
    for (int r = 0; r < d.k; ++r)
      for (int c = 0; c < d.q; ++c) out << ',' << d.x[n](r, c);
    out << '\n';
  }
}

}  // namespace structcov
