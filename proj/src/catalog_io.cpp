#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>
#include <zlib.h>

#include "starid/catalog.hpp"
#include "starid/errors.hpp"

namespace starid {

namespace {

constexpr char kMagic[8] = {'S', 'T', 'A', 'R', 'I', 'D', 'C', 'T'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8 + 8 + 32;
constexpr std::size_t kStarBytes = 4 + 6 * 8;
constexpr std::size_t kCrcBytes = 4;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::array<std::uint8_t, sizeof(T)> raw;
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (at_ + sizeof(T) > bytes_.size()) throw FormatError("catalog file truncated");
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + at_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    at_ += sizeof(T);
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t at_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> serialize_catalog(const OnboardCatalog& cat) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + cat.size() * kStarBytes + kCrcBytes);
  out.resize(sizeof(kMagic));
  std::memcpy(out.data(), kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCatalogFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cat.size()));
  put<double>(out, cat.metadata().mag_limit);
  put<double>(out, cat.metadata().min_sep_rad);
  out.insert(out.end(), cat.metadata().source_hash.begin(), cat.metadata().source_hash.end());
  for (const CatalogStar& s : cat.stars()) {
    put<std::uint32_t>(out, s.id);
    put<double>(out, s.c.x());
    put<double>(out, s.c.y());
    put<double>(out, s.c.z());
    put<double>(out, s.mag);
    put<double>(out, s.phi1);
    put<double>(out, s.phi2);
  }
  put<std::uint32_t>(out, crc32_of(out));
  return out;
}

OnboardCatalog deserialize_catalog(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + kCrcBytes) throw FormatError("catalog file truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError("catalog file: bad magic");

  Reader rd(bytes.subspan(sizeof(kMagic)));
  const auto version = rd.get<std::uint32_t>();
  if (version != kCatalogFormatVersion) {
    throw FormatError("catalog file: unsupported version (expected " + std::to_string(kCatalogFormatVersion) +
                      ", found " + std::to_string(version) + ")");
  }
  const auto count = rd.get<std::uint32_t>();
  const std::size_t expected = kHeaderBytes + std::size_t{count} * kStarBytes + kCrcBytes;
  if (bytes.size() < expected) throw FormatError("catalog file truncated");
  if (bytes.size() > expected) throw FormatError("catalog file has trailing bytes");

  const std::size_t payload = expected - kCrcBytes;
  const std::uint32_t stored_crc = Reader(bytes.subspan(payload)).get<std::uint32_t>();
  if (stored_crc != crc32_of(bytes.first(payload))) throw FormatError("catalog file: checksum mismatch");

  CatalogMetadata meta;
  meta.mag_limit = rd.get<double>();
  meta.min_sep_rad = rd.get<double>();
  for (auto& b : meta.source_hash) b = rd.get<std::uint8_t>();

  std::vector<CatalogStar> stars(count);
  for (CatalogStar& s : stars) {
    s.id = rd.get<std::uint32_t>();
    Vec3 v;
    v.x() = rd.get<double>();
    v.y() = rd.get<double>();
    v.z() = rd.get<double>();
    if (std::abs(v.norm() - 1.0) > 1e-9) throw FormatError("catalog file: star vector is not unit length");
    s.c = UnitVec3::from_normalized(v);
    s.mag = rd.get<double>();
    s.phi1 = rd.get<double>();
    s.phi2 = rd.get<double>();
    if (!(s.phi1 > 0.0 && s.phi1 <= s.phi2)) throw FormatError("catalog file: invalid triplet feature");
  }
  for (std::size_t k = 1; k < stars.size(); ++k) {
    if (stars[k].mag < stars[k - 1].mag) throw FormatError("catalog file: stars not sorted by magnitude");
  }
  return OnboardCatalog(std::move(stars), meta);
}

void save_catalog(const OnboardCatalog& cat, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_catalog(cat);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

OnboardCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return deserialize_catalog(bytes);
}

SourceHash sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  SourceHash h{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, h.data(), &len);
  EVP_MD_CTX_free(ctx);
  return h;
}

std::string to_hex(const SourceHash& h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint8_t b : h) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

}  // namespace starid
