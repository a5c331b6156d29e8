// Copyright 2026 The mrg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Layout of an MRGK1 file (all integers and floats little-endian):
//
//   char[5]  "MRGK1"
//   u8       model tag
//   u8       renewal law tag
//   u8       reserved (0)
//   u32      n_max
//   f64      tail_tol
//   repeated n = 0..n_max:
//     i64    window radius W_n
//     f64    tail mass
//     u64    payload length L_n
//     f64[L_n]
//   renewal only:
//     u64 + f64[]  inter-arrival table f(0..n_max)
//     u64 + f64[]  survival table S(0..n_max)

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mrg/error.hpp"
#include "mrg/kernels.hpp"

namespace mrg {
namespace {

constexpr char kMagic[5] = {'M', 'R', 'G', 'K', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) fail(ErrorKind::kIo, "truncated kernel cache");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_array(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  for (double x : v) put<double>(out, x);
}

std::vector<double> get_array(std::istream& in, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) fail(ErrorKind::kIo, "corrupt kernel cache payload length");
  std::vector<double> v(n);
  for (auto& x : v) x = get<double>(in);
  return v;
}

}  // namespace

std::string kernel_cache_name(ModelKind model, int n_max, double tail_tol,
                              RenewalLaw law) {
  std::ostringstream os;
  os << to_string(model) << "_n" << n_max << "_tol" << std::hexfloat << tail_tol;
  if (model == ModelKind::kRenewalHalf && law == RenewalLaw::kDegenerate)
    os << "_degenerate";
  os << ".mrgk";
  return os.str();
}

void save_kernel_cache(const LatticeKernel& k, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(k.model_));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(k.renewal_law_));
  put<std::uint8_t>(out, 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(k.n_max_));
  put<double>(out, k.tail_tol_);
  for (int n = 0; n <= k.n_max_; ++n) {
    put<std::int64_t>(out, k.radius_[n]);
    put<double>(out, k.tail_[n]);
    put_array(out, k.rows_[n]);
  }
  if (k.model_ == ModelKind::kRenewalHalf) {
    put_array(out, k.f_);
    put_array(out, k.survival_);
  }
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

LatticeKernel load_kernel_cache(const std::filesystem::path& path,
                                ModelKind model, int n_max, double tail_tol,
                                RenewalLaw law) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorKind::kIo, path.string() + " is not an MRGK1 kernel cache");

  LatticeKernel k;
  k.model_ = static_cast<ModelKind>(get<std::uint8_t>(in));
  k.renewal_law_ = static_cast<RenewalLaw>(get<std::uint8_t>(in));
  (void)get<std::uint8_t>(in);
  k.n_max_ = static_cast<int>(get<std::uint32_t>(in));
  k.tail_tol_ = get<double>(in);

  const bool law_matters = model == ModelKind::kRenewalHalf;
  if (k.model_ != model || k.n_max_ != n_max || k.tail_tol_ != tail_tol ||
      (law_matters && k.renewal_law_ != law)) {
    fail(ErrorKind::kIo, "kernel cache " + path.string() +
                             " was written for a different (model, n_max, tail_tol)");
  }

  const std::uint64_t limit = std::uint64_t{1} << 40;
  k.radius_.resize(n_max + 1);
  k.tail_.resize(n_max + 1);
  k.rows_.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    k.radius_[n] = get<std::int64_t>(in);
    k.tail_[n] = get<double>(in);
    k.rows_[n] = get_array(in, limit);
  }
  if (model == ModelKind::kRenewalHalf) {
    k.f_ = get_array(in, limit);
    k.survival_ = get_array(in, limit);
  }
  return k;
}

LatticeKernel build_kernel_cached(const std::filesystem::path& dir,
                                  ModelKind model, int n_max, double tail_tol,
                                  const KernelOptions& options) {
  const auto path = dir / kernel_cache_name(model, n_max, tail_tol, options.renewal_law);
  if (std::filesystem::exists(path)) {
    return load_kernel_cache(path, model, n_max, tail_tol, options.renewal_law);
  }
  LatticeKernel k = build_kernel(model, n_max, tail_tol, options);
  std::filesystem::create_directories(dir);
  save_kernel_cache(k, path);
  return k;
}

}  // namespace mrg
