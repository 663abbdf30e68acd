#include "starid/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "starid/errors.hpp"

namespace starid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_field(std::string_view field, std::size_t line_no, const char* name) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("catalog CSV line " + std::to_string(line_no) + ": bad " + name + " '" +
                      std::string(field) + "'");
  }
  return value;
}

}  // namespace

OnboardCatalog::OnboardCatalog(std::vector<CatalogStar> stars, CatalogMetadata meta)
    : stars_(std::move(stars)), meta_(meta) {}

std::pair<std::size_t, std::size_t> OnboardCatalog::magnitude_window(double lo, double hi) const {
  const auto first = std::lower_bound(stars_.begin(), stars_.end(), lo,
                                      [](const CatalogStar& s, double v) { return s.mag < v; });
  const auto last = std::upper_bound(first, stars_.end(), hi,
                                     [](double v, const CatalogStar& s) { return v < s.mag; });
  return {static_cast<std::size_t>(first - stars_.begin()), static_cast<std::size_t>(last - stars_.begin())};
}

UnitVec3 radec_to_unit(double ra_deg, double dec_deg) {
  const double ra = deg_to_rad(ra_deg);
  const double dec = deg_to_rad(dec_deg);
  return UnitVec3(std::cos(dec) * std::cos(ra), std::cos(dec) * std::sin(ra), std::sin(dec));
}

std::vector<RawStar> parse_raw_catalog_csv(std::istream& in) {
  std::vector<RawStar> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (row != "id,ra_deg,dec_deg,vmag") {
        throw FormatError("catalog CSV: expected header 'id,ra_deg,dec_deg,vmag', found '" + std::string(row) + "'");
      }
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::size_t start = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t comma = row.find(',', start);
      if ((k < 3) == (comma == std::string_view::npos)) {
        throw FormatError("catalog CSV line " + std::to_string(line_no) + ": expected 4 fields");
      }
      fields[k] = row.substr(start, k < 3 ? comma - start : std::string_view::npos);
      start = comma + 1;
    }
    RawStar s;
    s.id = parse_field<std::int64_t>(fields[0], line_no, "id");
    s.ra_deg = parse_field<double>(fields[1], line_no, "ra_deg");
    s.dec_deg = parse_field<double>(fields[2], line_no, "dec_deg");
    s.mag = parse_field<double>(fields[3], line_no, "vmag");
    if (!(s.ra_deg >= 0.0 && s.ra_deg < 360.0) || !(s.dec_deg >= -90.0 && s.dec_deg <= 90.0)) {
      throw FormatError("catalog CSV line " + std::to_string(line_no) + ": coordinates out of range");
    }
    out.push_back(s);
  }
  return out;
}

std::vector<RawStar> read_raw_catalog_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_raw_catalog_csv(in);
}

OnboardCatalog build_onboard_catalog(std::span<const RawStar> raw, double mag_limit, double min_sep_rad,
                                     const SourceHash& source_hash) {
  std::vector<const RawStar*> bright;
  for (const RawStar& s : raw) {
    if (s.mag <= mag_limit) bright.push_back(&s);
  }

  std::vector<Vec3> vecs(bright.size());
  for (std::size_t i = 0; i < bright.size(); ++i) vecs[i] = radec_to_unit(bright[i]->ra_deg, bright[i]->dec_deg).vec();

  // Binary-star removal: both members of any pair closer than min_sep go.
  std::vector<bool> keep(bright.size(), true);
  if (min_sep_rad > 0.0) {
    const double cos_sep = std::cos(min_sep_rad);
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      for (std::size_t j = i + 1; j < vecs.size(); ++j) {
        if (vecs[i].dot(vecs[j]) > cos_sep) keep[i] = keep[j] = false;
      }
    }
  }

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < bright.size(); ++i) {
    if (keep[i]) survivors.push_back(i);
  }
  if (survivors.size() < 3) {
    throw EmptyCatalog("only " + std::to_string(survivors.size()) + " stars survive mag <= " +
                       std::to_string(mag_limit) + " and binary removal");
  }

  std::vector<Vec3> kept(survivors.size());
  for (std::size_t k = 0; k < survivors.size(); ++k) kept[k] = vecs[survivors[k]];
  const std::vector<NearestTwo> nn = nearest_two_angles(kept);

  std::vector<CatalogStar> stars(survivors.size());
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    const RawStar& r = *bright[survivors[k]];
    if (r.id < 0 || r.id > std::numeric_limits<std::uint32_t>::max()) {
      throw FormatError("catalog id " + std::to_string(r.id) + " does not fit in 32 bits");
    }
    stars[k] = CatalogStar{static_cast<std::uint32_t>(r.id), UnitVec3::from_normalized(kept[k]), r.mag,
                           nn[k].first, nn[k].second};
  }
  std::stable_sort(stars.begin(), stars.end(), [](const CatalogStar& a, const CatalogStar& b) {
    return a.mag < b.mag || (a.mag == b.mag && a.id < b.id);
  });
  return OnboardCatalog(std::move(stars), CatalogMetadata{mag_limit, min_sep_rad, source_hash});
}

std::vector<SubCatalog> extract_sub_catalogs(std::span<const SceneStar> scene, const OnboardCatalog& cat,
                                             double alpha_eps, double eps_v, int triplet_order) {
  const double tol = 2.0 * alpha_eps;
  std::vector<SubCatalog> out(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const SceneStar& q = scene[i];
    // Slightly widened window, then the exact test, so rounding in mag +/- eps_v
    // cannot change membership.
    const double slack = 1e-9 * (1.0 + std::abs(q.mag));
    const auto [first, last] = cat.magnitude_window(q.mag - eps_v - slack, q.mag + eps_v + slack);
    for (std::size_t j = first; j < last; ++j) {
      const CatalogStar& c = cat[j];
      if (std::abs(c.mag - q.mag) > eps_v) continue;
      if (triplet_order >= 1 && std::abs(c.phi1 - q.theta1) > tol) continue;
      if (triplet_order >= 2 && std::abs(c.phi2 - q.theta2) > tol) continue;
      out[i].indices.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

}  // namespace starid
