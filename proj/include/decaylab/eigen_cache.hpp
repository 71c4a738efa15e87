#pragma once

// Text cache for eigensystems, keyed by the interior mask, the spacing and the operator.
//
//   decaylab-eigencache v1 <m> <n> <dim> <key>
//   <op id>
//   m eigenvalue lines, n measure lines, then m blocks of n eigenvector entries,
//   every number written as %24.17e.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "decaylab/spectral.hpp"

namespace decaylab {

namespace detail {

inline void fnv1a(std::uint64_t& hash, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
}

inline std::string fixed_record(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%24.17e", v);
  return buf;
}

}  // namespace detail

/// Hex key over (mask, shape, h, operator description, Hardy metadata, requested count).
inline std::string cache_key(const EllipticOperator& op, std::size_t m) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const GridDomain& g = *op.domain;
  detail::fnv1a(hash, g.mask.data(), g.mask.size());
  detail::fnv1a(hash, g.shape.data(), sizeof(int) * g.shape.size());
  detail::fnv1a(hash, g.offset.data(), sizeof(int) * g.offset.size());
  detail::fnv1a(hash, &g.h, sizeof g.h);
  const std::string desc = op.describe();
  detail::fnv1a(hash, desc.data(), desc.size());
  detail::fnv1a(hash, &m, sizeof m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

inline void write_eigencache(const std::filesystem::path& file, const EigenSystem& eig, int dim,
                             const std::string& key) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    detail::require(static_cast<bool>(out), "cannot write cache file " + tmp, ErrorKind::io);
    out << "decaylab-eigencache v1 " << eig.count() << ' ' << eig.dimension << ' ' << dim << ' ' << key << '\n';
    out << eig.op_id << '\n';
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) out << detail::fixed_record(eig.eigenvalues[i]) << '\n';
    for (Eigen::Index i = 0; i < eig.measure.size(); ++i) out << detail::fixed_record(eig.measure[i]) << '\n';
    for (Eigen::Index c = 0; c < eig.eigenvectors.cols(); ++c)
      for (Eigen::Index r = 0; r < eig.eigenvectors.rows(); ++r)
        out << detail::fixed_record(eig.eigenvectors(r, c)) << '\n';
    detail::require(static_cast<bool>(out), "failed writing cache file " + tmp, ErrorKind::io);
  }
  std::filesystem::rename(tmp, file);
}

/// Returns the cached system when the file exists and its key matches.
inline std::optional<EigenSystem> read_eigencache(const std::filesystem::path& file, const std::string& key) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::string magic, version, fkey;
  std::size_t m = 0, n = 0;
  int dim = 0;
  in >> magic >> version >> m >> n >> dim >> fkey;
  if (!in || magic != "decaylab-eigencache" || version != "v1" || fkey != key) return std::nullopt;
  in.ignore(1);
  EigenSystem eig;
  std::getline(in, eig.op_id);
  eig.dimension = n;
  eig.eigenvalues.resize(static_cast<Eigen::Index>(m));
  eig.measure.resize(static_cast<Eigen::Index>(n));
  eig.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) in >> eig.eigenvalues[i];
  for (Eigen::Index i = 0; i < eig.measure.size(); ++i) in >> eig.measure[i];
  for (Eigen::Index c = 0; c < eig.eigenvectors.cols(); ++c)
    for (Eigen::Index r = 0; r < eig.eigenvectors.rows(); ++r) in >> eig.eigenvectors(r, c);
  detail::require(static_cast<bool>(in), "corrupt cache file " + file.string(), ErrorKind::io);
  return eig;
}

/// Cached eigensolve; `dir` empty disables the cache.
inline EigenSystem cached_eigensolve(const EllipticOperator& op, std::optional<std::size_t> m,
                                     const SolverOptions& opts, const std::filesystem::path& dir) {
  if (dir.empty()) return eigensolve(op, m, opts);
  const std::size_t want = m.value_or(op.size());
  const std::string key = cache_key(op, want);
  const auto file = dir / (key + ".eig");
  if (auto hit = read_eigencache(file, key)) return *hit;
  EigenSystem eig = eigensolve(op, m, opts);
  write_eigencache(file, eig, op.domain->dim, key);
  return eig;
}

}  // namespace decaylab
