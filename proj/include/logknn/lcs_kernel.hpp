#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logknn/encoding.hpp"

namespace logknn {

enum class KernelBackend { reference_dp, bit_parallel };

std::string to_string(KernelBackend backend);
KernelBackend kernel_backend_from_string(const std::string& name);

// Classic two-row dynamic program, O(|a|*|b|) time. The auditable oracle.
std::size_t lcs_length_dp(std::span<const Symbol> a, std::span<const Symbol> b);

// Per-symbol match masks over one fixed sequence, built once and reused for
// many comparisons against it. 64 row cells per machine word.
class MatchMasks {
public:
  MatchMasks(std::span<const Symbol> seq, std::size_t alphabet_size);

  // LCS length between the mask-side sequence and `other`.
  std::size_t lcs_with(std::span<const Symbol> other) const;

  std::size_t length() const noexcept { return len_; }

private:
  std::size_t len_ = 0;
  std::size_t words_ = 0;
  std::size_t alphabet_size_ = 0;
  std::vector<std::uint64_t> masks_;  // alphabet_size x words, row-major per symbol
};

std::size_t lcs_length_bitparallel(std::span<const Symbol> a, std::span<const Symbol> b,
                                   std::size_t alphabet_size);

// Dispatches on backend; validates that every symbol id is < alphabet_size.
std::size_t lcs_length(std::span<const Symbol> a, std::span<const Symbol> b,
                       KernelBackend backend, std::size_t alphabet_size);

// lcs / sqrt(|a|*|b|), in [0,1]; 1.0 exactly when a == b.
double nlcs(std::span<const Symbol> a, std::span<const Symbol> b, KernelBackend backend,
            std::size_t alphabet_size);
double nlcs_from_lcs(std::size_t lcs, std::size_t len_a, std::size_t len_b);

// min/sqrt(len_a*len_b), i.e. the similarity an identical-prefix pair would
// get: no pair with these lengths can score above it, ulp included.
double nlcs_upper_bound(std::size_t len_a, std::size_t len_b);

}  // namespace logknn
