#pragma once

#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace gradheat {

/// Shortest round-trippable decimal form of a real (printf %.17g).
std::string format_real(double v);

/// Quotes a CSV cell when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

/// An in-memory comma-separated table with a fixed column set.
class ReportTable {
 public:
  explicit ReportTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);

  /// Convenience: formats every real with format_real.
  void add_row_reals(const std::vector<double>& cells);

  std::size_t row_count() const { return rows_.size(); }
  std::string to_csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Collects tables, plot columns, and per-check summary records, then writes
/// them under one directory. All content files are deterministic for a fixed
/// input; the wall-clock timestamp goes to a separate manifest file that
/// byte-comparisons are expected to skip. Thread-safe: sweep workers feed one
/// writer through an internal mutex.
class ReportWriter {
 public:
  explicit ReportWriter(std::string out_dir);

  void add_table(const std::string& name, const ReportTable& table);

  /// Plain columnar plot data ("name.dat", '#'-prefixed header line).
  void add_columns(const std::string& name,
                   const std::vector<std::string>& headers,
                   const std::vector<std::vector<double>>& columns);

  /// One record per executed check: its name, the case label, pass/fail,
  /// and a free-form detail cell.
  void add_summary(const std::string& check, const std::string& label,
                   bool pass, const std::string& detail);

  bool all_passed() const;
  std::string summary_csv() const;

  /// Writes every file (tables, plot data, summary.csv, manifest.txt).
  /// Creates the directory if needed. Throws std::runtime_error on I/O
  /// failure. Returns the number of files written.
  int write() const;

  const std::string& out_dir() const { return out_dir_; }

 private:
  struct NamedFile {
    std::string name;
    std::string content;
  };
  struct SummaryRow {
    std::string check;
    std::string label;
    bool pass;
    std::string detail;
  };

  std::string out_dir_;
  mutable std::mutex mutex_;
  std::vector<NamedFile> files_;
  std::vector<SummaryRow> summaries_;
};

}  // namespace gradheat
