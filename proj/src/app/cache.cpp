#include "dimers/app/cache.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <vector>

#include "dimers/errors.hpp"

namespace dimers::app {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'M', 'E', 'I', 'G', '0', '1'};

class Writer {
 public:
  template <class T>
  void put(const T& x) {
    const auto* p = reinterpret_cast<const char*>(&x);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  void put_raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    bytes.insert(bytes.end(), p, p + n);
  }
  std::vector<char> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<char>& b) : bytes_(b) {}
  template <class T>
  bool get(T& x) {
    return get_raw(&x, sizeof(T));
  }
  bool get_raw(void* out, std::size_t n) {
    if (pos_ + n > bytes_.size()) return false;
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
    return true;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string cache_key(const ModelParams& params) {
  const std::int32_t N = params.N();
  const double fields[3] = {params.u(), params.w(), params.Omega()};
  std::uint64_t h = fnv1a(kMagic, sizeof(kMagic));
  h = fnv1a(&N, sizeof(N), h);
  h = fnv1a(fields, sizeof(fields), h);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_decomposition(const std::filesystem::path& file, const ModelParams& params, const EigenDecomposition& e) {
  Writer w;
  w.put(static_cast<std::int32_t>(params.N()));
  w.put(params.Omega());
  w.put(params.U());
  w.put(params.omega());
  const auto D = static_cast<std::uint64_t>(e.size());
  w.put(D);
  w.put_raw(e.energies.data(), D * sizeof(double));
  w.put_raw(e.vectors.data(), D * D * sizeof(double));
  for (const auto& t : e.sectors) {
    w.put(static_cast<std::int8_t>(t.lr));
    w.put(static_cast<std::int8_t>(t.pm));
  }
  const std::uint64_t sum = fnv1a(w.bytes.data(), w.bytes.size());

  std::filesystem::create_directories(file.parent_path());
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
    out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw ConfigError("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::optional<EigenDecomposition> load_decomposition(const std::filesystem::path& file, const ModelParams& params) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t sum = 0;
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) return std::nullopt;
  if (!in.read(reinterpret_cast<char*>(&sum), sizeof(sum))) return std::nullopt;
  const std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (fnv1a(payload.data(), payload.size()) != sum) return std::nullopt;

  Reader r(payload);
  std::int32_t N = 0;
  double Omega = 0, U = 0, omega = 0;
  std::uint64_t D = 0;
  if (!r.get(N) || !r.get(Omega) || !r.get(U) || !r.get(omega) || !r.get(D)) return std::nullopt;
  if (N != params.N() || Omega != params.Omega() || U != params.U() || omega != params.omega()) return std::nullopt;
  if (D != hilbert_dimension(N)) return std::nullopt;

  EigenDecomposition e;
  e.energies.resize(static_cast<Eigen::Index>(D));
  e.vectors.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  if (!r.get_raw(e.energies.data(), D * sizeof(double))) return std::nullopt;
  if (!r.get_raw(e.vectors.data(), D * D * sizeof(double))) return std::nullopt;
  e.sectors.resize(D);
  for (auto& t : e.sectors) {
    std::int8_t lr = 0, pm = 0;
    if (!r.get(lr) || !r.get(pm)) return std::nullopt;
    t = SectorTag{lr, pm};
  }
  if (!r.done()) return std::nullopt;
  return e;
}

EigenDecomposition DecompositionCache::get(const ModelParams& params, const FockBasis& basis) {
  if (!enabled_) {
    ++misses_;
    return solve_exact(params, basis);
  }
  const auto file = dir_ / ("eig_" + cache_key(params) + ".bin");
  if (std::filesystem::exists(file)) {
    if (auto e = load_decomposition(file, params)) {
      ++hits_;
      return std::move(*e);
    }
    std::cerr << "warning: ignoring unusable cache file " << file.string() << '\n';
  }
  ++misses_;
  EigenDecomposition e = solve_exact(params, basis);
  save_decomposition(file, params, e);
  return e;
}

}  // namespace dimers::app
