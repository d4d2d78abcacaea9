#pragma once

#include <cstdint>
#include <string>

#include "harness/config.hpp"
#include "hitchin/periods.hpp"

namespace harness {

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Hash of family, base coefficients, Hamiltonians and quadrature tolerance.
std::string cache_key(const hitchin::SpectralCurve& curve, const Tolerances& tol);

enum class CacheStatus { Hit, Miss, Corrupt };
const char* cache_status_name(CacheStatus s);

struct CachedPeriods {
  hitchin::PeriodData periods;
  CacheStatus status = CacheStatus::Miss;
  std::string path;
};

/// Loads periods from `<dir>/periods-<key>.json` when the stored checksum
/// matches, otherwise computes and rewrites the file. An empty dir disables
/// caching.
CachedPeriods cached_periods(const hitchin::SpectralCurve& curve, const Tolerances& tol, const std::string& dir);

}  // namespace harness
