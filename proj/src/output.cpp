#include "sqjcm/output.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqjcm::cli {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns) {
  if (columns.empty()) throw std::invalid_argument("write_csv: no columns");
  const std::size_t rows = columns.front().values->size();
  for (const auto& c : columns)
    if (c.values->size() != rows) throw std::invalid_argument("write_csv: ragged columns");
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out += columns[c].header;
    out += (c + 1 < columns.size()) ? ',' : '\n';
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += format_g17((*columns[c].values)[r]);
      out += (c + 1 < columns.size()) ? ',' : '\n';
    }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << out;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* headers) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty CSV " + path.string());
  std::vector<std::string> hdr;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) hdr.push_back(cell);
  }
  if (headers) *headers = hdr;
  std::vector<std::vector<double>> cols(hdr.size());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= cols.size()) throw std::runtime_error("ragged CSV row in " + path.string());
      cols[c++].push_back(std::stod(cell));
    }
  }
  return cols;
}

void write_svg_curve(const std::filesystem::path& path, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& title) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("write_svg_curve: need matching x/y with >= 2 points");
  const double w = 800, h = 400, ml = 50, mr = 15, mt = 25, mb = 35;
  const double x0 = x.front(), x1 = x.back();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<text x=\"" << w / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">"
     << title << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
     << "\" height=\"" << (h - mt - mb)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8
     << "\" text-anchor=\"middle\" font-size=\"12\">lambda t</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " << h / 2
     << ")\">P(t)</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    double px = ml + (x[i] - x0) / (x1 - x0) * (w - ml - mr);
    double py = mt + (1.0 - std::min(std::max(y[i], 0.0), 1.0)) * (h - mt - mb);
    os << format_g17(px) << ',' << format_g17(py) << ' ';
  }
  os << "\"/>\n</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << os.str();
}

void Manifest::add_file(const std::filesystem::path& dir, const std::string& name) {
  std::ifstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("manifest: missing file " + name);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  files.push_back({name, bytes.size(), fnv1a64(bytes)});
}

void Manifest::write(const std::filesystem::path& dir) const {
  nlohmann::json j;
  j["tool"] = "sqjcm";
  j["version"] = "1.0.0";
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config_json.empty() ? "{}" : config_json);
  j["status"] = status;
  j["wall_seconds"] = wall_seconds;
  auto farr = nlohmann::json::array();
  for (const auto& e : files) {
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(e.checksum));
    farr.push_back({{"name", e.name}, {"bytes", e.bytes}, {"fnv1a64", hex}});
  }
  j["files"] = farr;
  auto darr = nlohmann::json::object();
  for (const auto& [k, v] : diagnostics) darr[k] = v;
  j["diagnostics"] = darr;
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest.json");
  f << j.dump(2) << "\n";
}

}  // namespace sqjcm::cli
