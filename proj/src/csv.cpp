#include "brq/csv.hpp"

#include <cstdio>
#include <filesystem>

#include "brq/error.hpp"

namespace brq {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

// Notes are free text; keep the row shape intact.
std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::string format_csv(const CurveResult& result) {
  result.validate();
  std::string out = "mu";
  for (const auto& name : result.names) out += "," + sanitize(name);
  out += "\n";
  for (std::size_t i = 0; i < result.mu.size(); ++i) {
    out += num(result.mu[i]);
    for (const auto& col : result.columns) out += "," + num(col[i]);
    out += "\n";
  }
  for (const auto& f : result.fits)
    out += "#fit," + sanitize(f.series) + "," + num(f.lo) + "," + num(f.hi) + "," +
           num(f.fit.slope) + "," + num(f.fit.intercept) + "," + num(f.fit.residual) + "\n";
  for (const auto& [key, value] : result.notes)
    out += "#note," + sanitize(key) + "," + sanitize(value) + "\n";
  return out;
}

void write_csv(const CurveResult& result, const std::string& path) {
  const std::string text = format_csv(result);
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::Io, "write failed for " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::Io, "cannot move output into " + path);
  }
}

}  // namespace brq
