#pragma once

#include <string>
#include <utility>
#include <vector>

namespace svlab {

// Deterministic shortest round-trip formatting; identical runs produce
// byte-identical files.
std::string fmt_double(double v);

// Provenance header written at the top of every output file. Everything in
// it is reproducible from the manifest except the generated_at timestamp.
struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;

  Manifest& set(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
    return *this;
  }
  Manifest& set(const std::string& key, double value) { return set(key, fmt_double(value)); }
  Manifest& set(const std::string& key, long long value) {
    return set(key, std::to_string(value));
  }
};

void write_csv(const std::string& path, const Manifest& manifest, const std::string& header,
               const std::vector<std::string>& rows);

void write_text(const std::string& path, const std::string& content);

std::string timestamp_utc();

}  // namespace svlab
