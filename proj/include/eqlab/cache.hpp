#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "eqlab/core.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/io.hpp"
#include "eqlab/scaling.hpp"

namespace eqlab {

namespace detail {

inline constexpr char spectrum_cache_magic[8] = {'E', 'Q', 'S', 'P', 'E', 'C', '0', '1'};

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : data) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

template <class T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
bool read_pod(std::ifstream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return static_cast<bool>(in);
}

} // namespace detail

/// Stable key for one chain's spectrum file.
inline std::string spectrum_cache_key(const ChainSpec& spec) {
  const std::string canonical = "n=" + std::to_string(spec.n_sites) +
                                ";J=" + format_double(spec.coupling) +
                                ";g=" + format_double(spec.field) +
                                ";bc=" + to_string(spec.boundary);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(canonical)));
  return std::string("spectrum-") + hex + ".bin";
}

inline void save_spectrum(const std::filesystem::path& dir, const ChainSpec& spec,
                          const Spectrum& spectrum) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path path = dir / spectrum_cache_key(spec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_spectrum: cannot open " + tmp.string());
    out.write(detail::spectrum_cache_magic, sizeof(detail::spectrum_cache_magic));
    detail::write_pod(out, static_cast<std::uint32_t>(spec.n_sites));
    detail::write_pod(out, static_cast<std::uint32_t>(spec.boundary));
    detail::write_pod(out, spec.coupling);
    detail::write_pod(out, spec.field);
    detail::write_pod(out, static_cast<std::uint64_t>(spectrum.dim()));
    detail::write_pod(out, spectrum.residual);
    const Index dim = spectrum.dim();
    out.write(reinterpret_cast<const char*>(spectrum.eigenvalues.data()),
              static_cast<std::streamsize>(sizeof(double) * dim));
    out.write(reinterpret_cast<const char*>(spectrum.eigenvectors.data()),
              static_cast<std::streamsize>(sizeof(Complex) * dim * dim));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("save_spectrum: write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("save_spectrum: rename failed: " + ec.message());
  }
}

/// Loads a cached spectrum if present and its header matches the spec
/// exactly; corrupt or mismatched files read as a miss.
inline std::optional<Spectrum> load_spectrum(const std::filesystem::path& dir,
                                             const ChainSpec& spec) {
  const std::filesystem::path path = dir / spectrum_cache_key(spec);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  char magic[sizeof(detail::spectrum_cache_magic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, detail::spectrum_cache_magic, sizeof(magic)) != 0)
    return std::nullopt;

  std::uint32_t n_sites = 0, boundary = 0;
  double coupling = 0.0, field = 0.0, residual = 0.0;
  std::uint64_t dim = 0;
  if (!detail::read_pod(in, n_sites) || !detail::read_pod(in, boundary) ||
      !detail::read_pod(in, coupling) || !detail::read_pod(in, field) ||
      !detail::read_pod(in, dim) || !detail::read_pod(in, residual))
    return std::nullopt;
  if (n_sites != static_cast<std::uint32_t>(spec.n_sites) ||
      boundary != static_cast<std::uint32_t>(spec.boundary) || coupling != spec.coupling ||
      field != spec.field || dim != static_cast<std::uint64_t>(hilbert_dimension(spec.n_sites)))
    return std::nullopt;

  Spectrum spectrum;
  spectrum.residual = residual;
  spectrum.eigenvalues.resize(static_cast<Index>(dim));
  spectrum.eigenvectors.resize(static_cast<Index>(dim), static_cast<Index>(dim));
  in.read(reinterpret_cast<char*>(spectrum.eigenvalues.data()),
          static_cast<std::streamsize>(sizeof(double) * dim));
  in.read(reinterpret_cast<char*>(spectrum.eigenvectors.data()),
          static_cast<std::streamsize>(sizeof(Complex) * dim * dim));
  if (!in) return std::nullopt;
  in.get();
  if (!in.eof()) return std::nullopt;
  return spectrum;
}

/// Provider that fills and reuses an on-disk cache; with an empty directory
/// path it diagonalizes fresh every call.
inline SpectrumProvider caching_provider(std::filesystem::path cache_dir) {
  return [dir = std::move(cache_dir)](const ChainSpec& spec) {
    if (!dir.empty()) {
      if (std::optional<Spectrum> cached = load_spectrum(dir, spec))
        return std::make_shared<const Spectrum>(std::move(*cached));
    }
    auto spectrum = std::make_shared<const Spectrum>(diagonalize(build_hamiltonian(spec)));
    if (!dir.empty()) save_spectrum(dir, spec, *spectrum);
    return spectrum;
  };
}

} // namespace eqlab
