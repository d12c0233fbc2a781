#include "idmbdf/experiment.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace idmbdf {

namespace {

// Shortest text that parses back to the same binary64.
std::string round_trip(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "tsv") return ReportFormat::Tsv;
  if (name == "json-lines" || name == "jsonl") return ReportFormat::JsonLines;
  throw ConfigError("unknown report format '" + name + "' (expected csv, tsv or json-lines)");
}

std::string format_report(const ConvergenceReport& report, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::JsonLines) {
    for (const auto& cell : report.cells) {
      for (std::size_t i = 0; i < cell.N.size(); ++i) {
        nlohmann::ordered_json row;
        row["alpha"] = cell.alpha;
        row["gamma"] = cell.gamma;
        row["N"] = cell.N[i];
        row["error"] = cell.errors[i];
        row["rate"] = cell.rates[i] ? nlohmann::ordered_json(*cell.rates[i]) : nlohmann::ordered_json(nullptr);
        row["seed"] = report.seed;
        row["M"] = report.trajectories;
        os << row.dump() << '\n';
      }
    }
    return os.str();
  }

  const char sep = format == ReportFormat::Csv ? ',' : '\t';
  os << "alpha" << sep << "gamma" << sep << "N" << sep << "error" << sep << "rate" << sep << "seed" << sep << "M"
     << '\n';
  for (const auto& cell : report.cells) {
    for (std::size_t i = 0; i < cell.N.size(); ++i) {
      os << round_trip(cell.alpha) << sep << round_trip(cell.gamma) << sep << cell.N[i] << sep
         << round_trip(cell.errors[i]) << sep << (cell.rates[i] ? round_trip(*cell.rates[i]) : std::string())
         << sep << report.seed << sep << report.trajectories << '\n';
    }
  }
  return os.str();
}

void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write report to " + file.string());
  os << format_report(report, format);
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace idmbdf
