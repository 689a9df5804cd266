#include "gradheat/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gradheat {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ReportTable::ReportTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) {
    throw std::invalid_argument("a report table needs at least one column");
  }
}

void ReportTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("row width disagrees with the column set");
  }
  rows_.push_back(std::move(cells));
}

void ReportTable::add_row_reals(const std::vector<double>& cells) {
  std::vector<std::string> formatted;
  formatted.reserve(cells.size());
  for (double v : cells) formatted.push_back(format_real(v));
  add_row(std::move(formatted));
}

std::string ReportTable::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(columns_[i]);
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

ReportWriter::ReportWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {}

void ReportWriter::add_table(const std::string& name,
                             const ReportTable& table) {
  std::lock_guard<std::mutex> lock(mutex_);
  files_.push_back({name + ".csv", table.to_csv()});
}

void ReportWriter::add_columns(const std::string& name,
                               const std::vector<std::string>& headers,
                               const std::vector<std::vector<double>>& columns) {
  if (headers.size() != columns.size() || columns.empty()) {
    throw std::invalid_argument("plot data needs one header per column");
  }
  const std::size_t rows = columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) {
      throw std::invalid_argument("plot columns have unequal lengths");
    }
  }
  std::ostringstream out;
  out << '#';
  for (const auto& h : headers) out << ' ' << h;
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ' ';
      out << format_real(columns[c][r]);
    }
    out << '\n';
  }
  std::lock_guard<std::mutex> lock(mutex_);
  files_.push_back({name + ".dat", out.str()});
}

void ReportWriter::add_summary(const std::string& check,
                               const std::string& label, bool pass,
                               const std::string& detail) {
  std::lock_guard<std::mutex> lock(mutex_);
  summaries_.push_back({check, label, pass, detail});
}

bool ReportWriter::all_passed() const {
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& s : summaries_) {
    if (!s.pass) return false;
  }
  return true;
}

std::string ReportWriter::summary_csv() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ostringstream out;
  out << "check,case,status,detail\n";
  for (const auto& s : summaries_) {
    out << csv_escape(s.check) << ',' << csv_escape(s.label) << ','
        << (s.pass ? "pass" : "fail") << ',' << csv_escape(s.detail) << '\n';
  }
  return out.str();
}

int ReportWriter::write() const {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir_.empty() ? fs::path(".") : fs::path(out_dir_);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
  }

  auto emit = [&dir](const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + path.string());
  };

  std::lock_guard<std::mutex> lock(mutex_);
  int written = 0;
  for (const auto& file : files_) {
    emit(file.name, file.content);
    ++written;
  }
  {
    std::ostringstream out;
    out << "check,case,status,detail\n";
    for (const auto& s : summaries_) {
      out << csv_escape(s.check) << ',' << csv_escape(s.label) << ','
          << (s.pass ? "pass" : "fail") << ',' << csv_escape(s.detail)
          << '\n';
    }
    emit("summary.csv", out.str());
    ++written;
  }
  {
    // Wall-clock data lives here and only here, so report files stay
    // byte-identical across reruns.
    const auto now = std::chrono::system_clock::now();
    const std::time_t stamp = std::chrono::system_clock::to_time_t(now);
    char text[64];
    std::tm tm_utc{};
    gmtime_r(&stamp, &tm_utc);
    std::strftime(text, sizeof(text), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    std::ostringstream out;
    out << "generated " << text << '\n';
    out << "files " << files_.size() + 1 << '\n';
    emit("manifest.txt", out.str());
    ++written;
  }
  return written;
}

}  // namespace gradheat
