#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sisou {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
///
/// A block of four 32-bit outputs is a pure function of a 128-bit counter and
/// a 64-bit key, so any draw of any stream can be reproduced without replaying
/// the stream.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// Identifies one independent random stream.
///
/// Stream-splitting rule: the Philox key is the 64-bit `seed`; the counter is
/// (block index lo, block index hi, stream lo, stream hi). Ensembles assign
/// `stream = path index` under a shared seed, so path i of an ensemble is
/// reproducible on its own as StreamKey{seed, i}.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Standard normal variates from one Philox stream via Box-Muller.
///
/// Each counter block yields two 53-bit uniforms and hence two normals; the
/// k-th normal of a stream depends only on (seed, stream, k).
class NormalStream {
 public:
  explicit NormalStream(StreamKey key) noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  void fill(std::span<double> out) noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> words_{};
  int next_word_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sisou
