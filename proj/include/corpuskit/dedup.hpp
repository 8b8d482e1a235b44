#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpuskit/record.hpp"

namespace corpuskit {

using Digest = std::array<std::uint8_t, 16>;

/// MD5 of the UTF-8 bytes.
Digest md5(std::string_view bytes);
std::string to_hex(const Digest& digest);

/// Lowercase hex MD5 of `content`.
std::string content_digest(std::string_view content);

struct MinHashParams {
    std::size_t num_perm = 128;
    std::size_t shingle_k = 5;
    std::uint64_t seed = 0;
};

/// Per-permutation minima over the hashed word-shingle set.
///
/// Shingles are runs of `shingle_k` whitespace-separated words joined by a single
/// space; a document with 1..k-1 words contributes one shingle of all its words.
/// Each shingle is hashed with 64-bit FNV-1a and reduced modulo the Mersenne prime
/// p = 2^61 - 1. Permutation i is h_i(x) = (a_i * x + b_i) mod p, where (a_i, b_i)
/// are the (2i)-th and (2i+1)-th outputs of splitmix64 started at `seed`, reduced
/// mod p with a_i forced nonzero. A document without words gets the sentinel
/// signature (all values 2^64 - 1), which no real shingle can produce.
struct Signature {
    std::size_t shingle_k = 5;
    std::vector<std::uint64_t> values;

    std::size_t n_perm() const noexcept { return values.size(); }
    bool is_empty_sentinel() const;
    bool operator==(const Signature&) const = default;
};

inline constexpr std::uint64_t kEmptySentinel = ~std::uint64_t{0};

/// Word shingles of a document, as used by the signature.
std::vector<std::string> word_shingles(std::string_view content, std::size_t k);

Signature minhash_signature(std::string_view content, const MinHashParams& params = {});

/// Fraction of equal components. Signatures of different length compare as 0.
double estimate_similarity(const Signature& a, const Signature& b);

struct NearDedupParams {
    MinHashParams minhash;
    std::size_t bands = 16;
    std::size_t rows = 8;
    double threshold = 0.70;
};

struct DedupResult {
    /// Kept ids, sorted.
    std::vector<std::string> kept;
    /// (kept representative, removed id), sorted.
    std::vector<std::pair<std::string, std::string>> removed;
};

/// Clusters documents whose estimated similarity reaches the threshold.
///
/// Candidates come from LSH banding and are verified on the full signature;
/// exact-content duplicates are always merged. Each cluster keeps its
/// lexicographically smallest id, so the result does not depend on input order.
/// Throws ValidationError unless threshold is in (0,1] and bands*rows == num_perm.
DedupResult near_dedup(const std::vector<CorpusRecord>& records, const NearDedupParams& params = {});

/// Same, on precomputed (id, digest, signature) triples.
struct DedupItem {
    std::string id;
    std::string digest;
    Signature signature;
};
DedupResult near_dedup_items(std::vector<DedupItem> items, const NearDedupParams& params);

/// `kept<TAB>removed` lines.
std::string format_cluster_report(const DedupResult& result);

}  // namespace corpuskit
