#include "fsel/storage.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fsel/error.hpp"

namespace fsel {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw ValidationError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_feature_file(const LabeledFeatureSet& data) {
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  if (n == 0 || dim == 0) throw ValidationError("cannot encode an empty feature set");
  std::vector<std::uint8_t> out;
  out.reserve(kFfsbHeaderSize + n * 4 * (2 + dim));
  for (auto b : kFfsbMagic) out.push_back(b);
  put_u32(out, checked_u32(n, "n_samples"));
  put_u32(out, checked_u32(dim, "dim"));
  put_u32(out, data.n_classes());
  out.push_back(data.has_groups() ? 1 : 0);
  for (auto y : data.labels()) put_u32(out, y);
  if (data.has_groups()) {
    for (auto g : *data.groups()) put_u32(out, g);
  }
  for (double v : data.features().data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

void write_feature_file(const LabeledFeatureSet& data, const std::filesystem::path& path) {
  const auto bytes = encode_feature_file(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureFileHeader decode_feature_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kFfsbMagic.size() ||
      !std::equal(kFfsbMagic.begin(), kFfsbMagic.end(), bytes.begin())) {
    throw ValidationError("not an FFSB file");
  }
  if (bytes.size() < kFfsbHeaderSize) {
    throw ValidationError("FFSB header truncated: " + std::to_string(bytes.size()) +
                          " bytes");
  }
  FeatureFileHeader h;
  h.n_samples = get_u32(bytes.data() + 5);
  h.dim = get_u32(bytes.data() + 9);
  h.n_classes = get_u32(bytes.data() + 13);
  const std::uint8_t flag = bytes[17];
  if (flag > 1) throw ValidationError("FFSB has_groups must be 0 or 1, got " + std::to_string(flag));
  h.has_groups = flag == 1;
  if (h.n_samples == 0 || h.dim == 0 || h.n_classes == 0) {
    throw ValidationError("FFSB header: n_samples, dim and n_classes must be >= 1");
  }
  return h;
}

LabeledFeatureSet decode_feature_file(const std::vector<std::uint8_t>& bytes) {
  const FeatureFileHeader h = decode_feature_header(bytes);
  const std::uint64_t n = h.n_samples;
  const std::uint64_t expected =
      kFfsbHeaderSize + 4 * n * (h.has_groups ? 2 : 1) + 4 * n * h.dim;
  if (bytes.size() != expected) {
    throw ValidationError("FFSB size mismatch: header implies " + std::to_string(expected) +
                          " bytes, file has " + std::to_string(bytes.size()));
  }
  const std::uint8_t* p = bytes.data() + kFfsbHeaderSize;
  std::vector<std::uint32_t> labels(n);
  for (std::uint64_t i = 0; i < n; ++i, p += 4) {
    labels[i] = get_u32(p);
    if (labels[i] >= h.n_classes) {
      throw ValidationError("row " + std::to_string(i) + ": label " +
                            std::to_string(labels[i]) + " >= n_classes " +
                            std::to_string(h.n_classes));
    }
  }
  std::optional<std::vector<std::uint32_t>> groups;
  if (h.has_groups) {
    groups.emplace(n);
    for (std::uint64_t i = 0; i < n; ++i, p += 4) (*groups)[i] = get_u32(p);
  }
  std::vector<double> x(n * h.dim);
  for (double& v : x) {
    v = static_cast<double>(std::bit_cast<float>(get_u32(p)));
    p += 4;
  }
  return {Matrix(n, h.dim, std::move(x)), std::move(labels), h.n_classes, std::move(groups)};
}

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_vector(const std::string& text, const std::string& key, int line) {
  std::string normalized = text;
  for (char& ch : normalized) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(normalized);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw ValidationError("spec line " + std::to_string(line) + ": bad number '" + token +
                            "' for " + key);
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw ValidationError("spec line " + std::to_string(line) + ": " + key + " is empty");
  }
  return out;
}

}  // namespace

LabeledFeatureSet read_feature_file(const std::filesystem::path& path) {
  return decode_feature_file(read_bytes(path));
}

GaussianTaskSpec parse_gaussian_spec(const std::string& text) {
  std::map<std::string, std::vector<double>> values;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("spec line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key != "dim" && key != "mean_a" && key != "mean_b" && key != "std") {
      throw ValidationError("spec line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (values.count(key)) {
      throw ValidationError("spec line " + std::to_string(line) + ": repeated key '" + key + "'");
    }
    values[key] = parse_vector(body.substr(eq + 1), key, line);
  }
  for (const char* key : {"mean_a", "mean_b", "std"}) {
    if (!values.count(key)) throw ValidationError(std::string("spec: missing key '") + key + "'");
  }
  GaussianTaskSpec spec{values["mean_a"], values["mean_b"], values["std"]};
  if (values.count("dim")) {
    const auto& d = values["dim"];
    if (d.size() != 1 || d[0] != std::floor(d[0]) || d[0] < 1 ||
        static_cast<std::size_t>(d[0]) != spec.dim()) {
      throw ValidationError("spec: dim does not match the vector lengths");
    }
  }
  spec.validate();
  return spec;
}

GaussianTaskSpec read_gaussian_spec(const std::filesystem::path& path) {
  return parse_gaussian_spec(read_text(path));
}

std::string format_gaussian_spec(const GaussianTaskSpec& spec) {
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_cell(v[i]);
    }
    return s;
  };
  return "dim = " + std::to_string(spec.dim()) + "\nmean_a = " + join(spec.mean_a) +
         "\nmean_b = " + join(spec.mean_b) + "\nstd = " + join(spec.stddev) + "\n";
}

void ResultsTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw ValidationError("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t ResultsTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ValidationError("no column named '" + name + "'");
}

double ResultsTable::number(std::size_t row, const std::string& column) const {
  const Cell& cell = rows.at(row).at(column_index(column));
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  throw ValidationError("column '" + column + "' is not numeric");
}

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    // Non-finite values have no JSON number form.
    if (!std::isfinite(*d)) return format_cell(cell);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  return std::get<std::string>(cell);
}

nlohmann::ordered_json metadata_json(const ResultsTable& table) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  return meta;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_csv(const ResultsTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << csv_field(table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_field(format_cell(row[i]));
    }
    out << '\n';
  }
}

void write_json(const ResultsTable& table, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["metadata"] = metadata_json(table);
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void write_results(const ResultsTable& table, const std::filesystem::path& path,
                   ResultsFormat format) {
  std::ostringstream ss;
  if (format == ResultsFormat::kCsv) {
    write_csv(table, ss);
  } else {
    write_json(table, ss);
  }
  write_text(path, ss.str());
}

void write_metadata(const ResultsTable& table, const std::filesystem::path& path) {
  write_text(path, metadata_json(table).dump(2) + "\n");
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ValidationError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fsel
