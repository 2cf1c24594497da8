#include "svlab/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "svlab/error.hpp"
#include "svlab/version.hpp"

namespace svlab {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_csv(const std::string& path, const Manifest& manifest, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) fail(Errc::InvalidConfig, "cannot open '" + path + "' for writing");
  out << "# svlab " << kVersion << "\n";
  out << "# command: " << manifest.command << "\n";
  for (const auto& [k, v] : manifest.entries) out << "# " << k << ": " << v << "\n";
  out << "# generated_at: " << timestamp_utc() << "\n";
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(Errc::InvalidConfig, "cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace svlab
