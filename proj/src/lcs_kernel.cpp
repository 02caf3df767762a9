#include "logknn/lcs_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "logknn/error.hpp"

namespace logknn {

namespace {

void check_symbols(std::span<const Symbol> seq, std::size_t alphabet_size) {
  for (Symbol s : seq)
    if (s >= alphabet_size)
      throw Error("kernel", "symbol id " + std::to_string(s) + " outside alphabet of size " +
                                std::to_string(alphabet_size));
}

}  // namespace

std::string to_string(KernelBackend backend) {
  return backend == KernelBackend::reference_dp ? "reference-DP" : "bit-parallel";
}

KernelBackend kernel_backend_from_string(const std::string& name) {
  if (name == "reference-DP" || name == "reference-dp" || name == "dp")
    return KernelBackend::reference_dp;
  if (name == "bit-parallel" || name == "bitparallel") return KernelBackend::bit_parallel;
  throw Error("config", "unknown kernel backend '" + name +
                            "' (expected reference-DP or bit-parallel)");
}

std::size_t lcs_length_dp(std::span<const Symbol> a, std::span<const Symbol> b) {
  if (a.empty() || b.empty()) return 0;
  // Keep the inner loop over the longer side so the rows stay short.
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = a[i] == b[j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

MatchMasks::MatchMasks(std::span<const Symbol> seq, std::size_t alphabet_size)
    : len_(seq.size()),
      words_((seq.size() + 63) / 64),
      alphabet_size_(alphabet_size),
      masks_(alphabet_size * words_, 0) {
  check_symbols(seq, alphabet_size);
  for (std::size_t i = 0; i < seq.size(); ++i)
    masks_[seq[i] * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
}

std::size_t MatchMasks::lcs_with(std::span<const Symbol> other) const {
  if (len_ == 0 || other.empty()) return 0;

  // Row state V: a 0 bit at position i means row cell i already counts toward
  // the LCS. Starts all-ones; bits past len_ are ignored at the end because
  // carries only ever travel upward.
  std::uint64_t v_small[4];
  std::vector<std::uint64_t> v_heap;
  std::uint64_t* v = v_small;
  if (words_ > 4) {
    v_heap.assign(words_, ~std::uint64_t{0});
    v = v_heap.data();
  } else {
    std::fill(v_small, v_small + words_, ~std::uint64_t{0});
  }

  for (Symbol s : other) {
    if (s >= alphabet_size_)
      throw Error("kernel", "symbol id " + std::to_string(s) + " outside alphabet of size " +
                                std::to_string(alphabet_size_));
    const std::uint64_t* m = &masks_[s * words_];
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      const std::uint64_t u = v[w] & m[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t c1 = sum < v[w];
      const std::uint64_t sum2 = sum + carry;
      const std::uint64_t c2 = sum2 < sum;
      v[w] = sum2 | (v[w] & ~m[w]);
      carry = c1 | c2;
    }
  }

  std::size_t ones = 0;
  for (std::size_t w = 0; w + 1 < words_; ++w) ones += std::popcount(v[w]);
  const std::size_t tail = len_ % 64;
  const std::uint64_t tail_mask = tail == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;
  ones += std::popcount(v[words_ - 1] & tail_mask);
  return len_ - ones;
}

std::size_t lcs_length_bitparallel(std::span<const Symbol> a, std::span<const Symbol> b,
                                   std::size_t alphabet_size) {
  if (a.empty() || b.empty()) return 0;
  // Mask side = shorter sequence: fewer words per inner step.
  if (a.size() > b.size()) std::swap(a, b);
  return MatchMasks(a, alphabet_size).lcs_with(b);
}

std::size_t lcs_length(std::span<const Symbol> a, std::span<const Symbol> b,
                       KernelBackend backend, std::size_t alphabet_size) {
  check_symbols(a, alphabet_size);
  check_symbols(b, alphabet_size);
  if (backend == KernelBackend::reference_dp) return lcs_length_dp(a, b);
  return lcs_length_bitparallel(a, b, alphabet_size);
}

double nlcs_from_lcs(std::size_t lcs, std::size_t len_a, std::size_t len_b) {
  return static_cast<double>(lcs) /
         std::sqrt(static_cast<double>(len_a) * static_cast<double>(len_b));
}

double nlcs(std::span<const Symbol> a, std::span<const Symbol> b, KernelBackend backend,
            std::size_t alphabet_size) {
  return nlcs_from_lcs(lcs_length(a, b, backend, alphabet_size), a.size(), b.size());
}

double nlcs_upper_bound(std::size_t len_a, std::size_t len_b) {
  // must be >= nlcs_from_lcs(l, len_a, len_b) for every achievable l, in the
  // rounded doubles themselves, so pruning on it never drops an exact tie.
  // reusing the similarity expression with l = min(len_a, len_b) guarantees
  // that; the algebraically equal sqrt(min/max) can land 1 ulp below it.
  return nlcs_from_lcs(std::min(len_a, len_b), len_a, len_b);
}

}  // namespace logknn
