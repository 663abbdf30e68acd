#pragma once

// Onboard catalog: magnitude-limited, binary-filtered stars with their
// precomputed triplet features, plus per-scene-star sub-catalog extraction.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "starid/geometry.hpp"
#include "starid/scene.hpp"

namespace starid {

/// One row of a raw input catalog (e.g. Hipparcos).
struct RawStar {
  std::int64_t id = 0;
  double ra_deg = 0.0;
  double dec_deg = 0.0;
  double mag = 0.0;
};

struct CatalogStar {
  std::uint32_t id = 0;
  UnitVec3 c;
  double mag = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

using SourceHash = std::array<std::uint8_t, 32>;

struct CatalogMetadata {
  double mag_limit = 0.0;
  double min_sep_rad = 0.0;
  SourceHash source_hash{};
};

/// Stars sorted ascending by magnitude.
class OnboardCatalog {
 public:
  OnboardCatalog() = default;
  OnboardCatalog(std::vector<CatalogStar> stars, CatalogMetadata meta);

  std::size_t size() const { return stars_.size(); }
  const CatalogStar& operator[](std::size_t i) const { return stars_[i]; }
  std::span<const CatalogStar> stars() const { return stars_; }
  const CatalogMetadata& metadata() const { return meta_; }

  /// Index range [first, last) of stars with lo <= mag <= hi (binary search).
  std::pair<std::size_t, std::size_t> magnitude_window(double lo, double hi) const;

  double brightest_mag() const { return stars_.empty() ? 0.0 : stars_.front().mag; }

 private:
  std::vector<CatalogStar> stars_;
  CatalogMetadata meta_;
};

/// Sub-catalog of one scene star: indices into the onboard catalog.
struct SubCatalog {
  std::vector<std::uint32_t> indices;
};

/// Equatorial (ra, dec) in degrees to an inertial unit vector.
UnitVec3 radec_to_unit(double ra_deg, double dec_deg);

/// Parses `id,ra_deg,dec_deg,vmag` CSV with a header row.
std::vector<RawStar> parse_raw_catalog_csv(std::istream& in);
std::vector<RawStar> read_raw_catalog_csv(const std::filesystem::path& path);

/// Filters by magnitude, drops every star of a pair closer than min_sep_rad,
/// computes triplet features over the survivors and sorts by magnitude.
/// Throws EmptyCatalog if fewer than three stars survive.
OnboardCatalog build_onboard_catalog(std::span<const RawStar> raw, double mag_limit, double min_sep_rad,
                                     const SourceHash& source_hash = {});

/// Membership rule per scene star i: |phi_k(j) - theta_k(i)| <= 2 alpha_eps for
/// k = 1..triplet_order and |mag(j) - mag(i)| <= eps_v. triplet_order is 0, 1
/// or 2; 0 leaves the magnitude test only.
std::vector<SubCatalog> extract_sub_catalogs(std::span<const SceneStar> scene, const OnboardCatalog& cat,
                                             double alpha_eps, double eps_v, int triplet_order = 2);

// Binary onboard-catalog file (little-endian):
//   "STARIDCT" | u32 version | u32 count | f64 mag_limit | f64 min_sep_rad |
//   32-byte source hash | count x (u32 id, 3 x f64 vector, f64 mag, 2 x f64
//   triplet feature) | u32 CRC32 of every preceding byte.
inline constexpr std::uint32_t kCatalogFormatVersion = 1;

std::vector<std::uint8_t> serialize_catalog(const OnboardCatalog& cat);
OnboardCatalog deserialize_catalog(std::span<const std::uint8_t> bytes);
void save_catalog(const OnboardCatalog& cat, const std::filesystem::path& path);
OnboardCatalog load_catalog(const std::filesystem::path& path);

SourceHash sha256_file(const std::filesystem::path& path);
std::string to_hex(const SourceHash& h);

}  // namespace starid
