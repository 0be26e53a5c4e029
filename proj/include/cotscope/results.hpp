#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace cotscope {

/// One named scalar. An empty sample_id marks an aggregate over the run.
struct MetricRecord {
  std::string metric;
  double value = 0.0;
  std::string sample_id;
  std::string setting;  // e.g. faithful / unfaithful / average, cot / no_cot
  std::string fingerprint;
};

/// Rows of a CSV file; the store appends a config_fingerprint column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Single writer for one run directory. Records are kept in insertion order
/// and written on flush; (metric, sample_id, setting) must be unique.
///
/// Layout:
///   <dir>/config.json   resolved config echo + fingerprint
///   <dir>/metrics.csv   metric,value,sample_id,setting,config_fingerprint
///   <dir>/<name>.csv    tables added through add_table
///   <dir>/errors.csv    sample_id,error (only when errors occurred)
class ResultStore {
 public:
  ResultStore(std::filesystem::path dir, std::string fingerprint, std::string config_json);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  void add(std::string metric, double value, std::string sample_id, std::string setting);
  void add_table(const std::string& name, CsvTable table);
  void add_error(const std::string& sample_id, const std::string& message);
  /// Extra non-CSV artifact written verbatim (relative path inside dir).
  void add_file(const std::string& relative, std::string content);

  std::size_t error_count() const noexcept { return errors_.size(); }
  const std::vector<MetricRecord>& records() const noexcept { return records_; }

  void flush() const;

 private:
  std::filesystem::path dir_;
  std::string fingerprint_;
  std::string config_json_;
  std::vector<MetricRecord> records_;
  std::set<std::tuple<std::string, std::string, std::string>> keys_;
  std::vector<std::pair<std::string, CsvTable>> tables_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::pair<std::string, std::string>> errors_;
};

std::string render_csv(const CsvTable& table, const std::string& fingerprint);

/// Parses a CSV written by render_csv (quoted fields allowed).
CsvTable parse_csv(const std::string& text);

}  // namespace cotscope
