#include "cotscope/results.hpp"

#include <fstream>
#include <stdexcept>

#include "cotscope/error.hpp"
#include "cotscope/text_format.hpp"

namespace cotscope {

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

}  // namespace

ResultStore::ResultStore(std::filesystem::path dir, std::string fingerprint, std::string config_json)
    : dir_(std::move(dir)), fingerprint_(std::move(fingerprint)), config_json_(std::move(config_json)) {}

void ResultStore::add(std::string metric, double value, std::string sample_id, std::string setting) {
  if (!keys_.emplace(metric, sample_id, setting).second) {
    throw std::logic_error("duplicate metric record " + metric + "/" + sample_id + "/" + setting);
  }
  records_.push_back({std::move(metric), value, std::move(sample_id), std::move(setting), fingerprint_});
}

void ResultStore::add_table(const std::string& name, CsvTable table) { tables_.emplace_back(name, std::move(table)); }

void ResultStore::add_error(const std::string& sample_id, const std::string& message) {
  errors_.emplace_back(sample_id, message);
}

void ResultStore::add_file(const std::string& relative, std::string content) {
  files_.emplace_back(relative, std::move(content));
}

void ResultStore::flush() const {
  write_file(dir_ / "config.json", config_json_);
  CsvTable metrics{{"metric", "value", "sample_id", "setting"}, {}};
  for (const auto& r : records_) metrics.rows.push_back({r.metric, format_double(r.value), r.sample_id, r.setting});
  write_file(dir_ / "metrics.csv", render_csv(metrics, fingerprint_));
  for (const auto& [name, table] : tables_) write_file(dir_ / (name + ".csv"), render_csv(table, fingerprint_));
  for (const auto& [rel, content] : files_) write_file(dir_ / rel, content);
  if (!errors_.empty()) {
    CsvTable errs{{"sample_id", "error"}, {}};
    for (const auto& [id, msg] : errors_) errs.rows.push_back({id, msg});
    write_file(dir_ / "errors.csv", render_csv(errs, fingerprint_));
  } else {
    std::filesystem::remove(dir_ / "errors.csv");
  }
}

std::string render_csv(const CsvTable& table, const std::string& fingerprint) {
  std::string out;
  for (const auto& h : table.header) out += csv_field(h) + ",";
  out += "config_fingerprint\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::logic_error("csv row width mismatch");
    for (const auto& f : row) out += csv_field(f) + ",";
    out += fingerprint + "\n";
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      lines.push_back(std::move(row));
      row.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    lines.push_back(std::move(row));
  }
  CsvTable t;
  if (lines.empty()) return t;
  t.header = std::move(lines.front());
  t.rows.assign(std::make_move_iterator(lines.begin() + 1), std::make_move_iterator(lines.end()));
  return t;
}

}  // namespace cotscope
