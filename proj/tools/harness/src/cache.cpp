#include "harness/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "harness/serialize.hpp"

namespace harness {

using namespace hitchin;
namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void put(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%a;", v);
  s += buf;
}

}  // namespace

std::string cache_key(const SpectralCurve& curve, const Tolerances& tol) {
  std::string s(family_name(curve.family()));
  s += ';';
  for (cplx c : curve.base().coeffs()) put(s, c.real()), put(s, c.imag());
  for (cplx c : curve.hams()) put(s, c.real()), put(s, c.imag());
  put(s, tol.quadrature);
  return hex(fnv1a(s));
}

const char* cache_status_name(CacheStatus s) {
  return s == CacheStatus::Hit ? "hit" : s == CacheStatus::Miss ? "miss" : "corrupt";
}

CachedPeriods cached_periods(const SpectralCurve& curve, const Tolerances& tol, const std::string& dir) {
  CachedPeriods out;
  const QuadratureOptions q{tol.quadrature, tol.quadrature, QuadratureOptions{}.max_depth};
  if (dir.empty()) {
    out.periods = compute_periods(curve, q);
    return out;
  }
  const std::string key = cache_key(curve, tol);
  out.path = (fs::path(dir) / ("periods-" + key + ".json")).string();
  if (std::ifstream in{out.path}) {
    out.status = CacheStatus::Corrupt;
    try {
      const json file = json::parse(in);
      const std::string payload = file.at("payload").get<std::string>();
      if (file.at("key").get<std::string>() == key && file.at("checksum").get<std::string>() == hex(fnv1a(payload))) {
        out.periods = period_data_from_json(json::parse(payload));
        out.status = CacheStatus::Hit;
        return out;
      }
    } catch (const std::exception&) {
    }
  }
  out.periods = compute_periods(curve, q);
  const std::string payload = to_json(out.periods).dump();
  fs::create_directories(dir);
  const std::string tmp = out.path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    os << json{{"key", key}, {"checksum", hex(fnv1a(payload))}, {"payload", payload}}.dump() << '\n';
  }
  fs::rename(tmp, out.path);
  return out;
}

}  // namespace harness
