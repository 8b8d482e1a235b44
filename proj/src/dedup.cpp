#include "corpuskit/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <unordered_map>

#include <openssl/evp.h>

#include "corpuskit/errors.hpp"

namespace corpuskit {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod_mersenne(unsigned __int128 x) {
    // x mod (2^61 - 1) without division.
    std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t r = lo + hi;
    while (r >= kMersenne61) r -= kMersenne61;
    return r;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

struct Permutations {
    std::vector<std::uint64_t> a, b;
};

Permutations make_permutations(std::size_t n, std::uint64_t seed) {
    Permutations p;
    p.a.reserve(n);
    p.b.reserve(n);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t a = splitmix64(state) % kMersenne61;
        if (a == 0) a = 1;
        p.a.push_back(a);
        p.b.push_back(splitmix64(state) % kMersenne61);
    }
    return p;
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> words;
    for (std::size_t i = 0; i < s.size();) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t w = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > w) words.push_back(s.substr(w, i - w));
    }
    return words;
}

// Union-find keyed by index; the root is always the smallest index, which is
// the smallest id because items are sorted by id.
struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (y < x) std::swap(x, y);
        parent[y] = x;
    }
};

}  // namespace

Digest md5(std::string_view bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_md5(), nullptr) != 1 || len != out.size()) {
        throw Error("MD5 computation failed");
    }
    return out;
}

std::string to_hex(const Digest& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (const auto byte : digest) {
        out += kHex[byte >> 4];
        out += kHex[byte & 0xF];
    }
    return out;
}

std::string content_digest(std::string_view content) { return to_hex(md5(content)); }

bool Signature::is_empty_sentinel() const {
    return !values.empty() && std::all_of(values.begin(), values.end(), [](auto v) { return v == kEmptySentinel; });
}

std::vector<std::string> word_shingles(std::string_view content, std::size_t k) {
    const auto words = split_words(content);
    std::vector<std::string> shingles;
    if (words.empty() || k == 0) return shingles;
    const std::size_t width = std::min(k, words.size());
    for (std::size_t i = 0; i + width <= words.size(); ++i) {
        std::string s(words[i]);
        for (std::size_t j = 1; j < width; ++j) {
            s += ' ';
            s += words[i + j];
        }
        shingles.push_back(std::move(s));
    }
    return shingles;
}

Signature minhash_signature(std::string_view content, const MinHashParams& params) {
    Signature sig;
    sig.shingle_k = params.shingle_k;
    const auto shingles = word_shingles(content, params.shingle_k);
    if (shingles.empty()) {
        sig.values.assign(params.num_perm, kEmptySentinel);
        return sig;
    }
    static thread_local std::map<std::pair<std::size_t, std::uint64_t>, Permutations> cache;
    auto key = std::make_pair(params.num_perm, params.seed);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_permutations(params.num_perm, params.seed)).first;
    const Permutations& perm = it->second;

    std::vector<std::uint64_t> hashes;
    hashes.reserve(shingles.size());
    for (const auto& s : shingles) hashes.push_back(fnv1a64(s) % kMersenne61);
    std::sort(hashes.begin(), hashes.end());
    hashes.erase(std::unique(hashes.begin(), hashes.end()), hashes.end());

    sig.values.assign(params.num_perm, kMersenne61);
    for (std::size_t i = 0; i < params.num_perm; ++i) {
        std::uint64_t best = kMersenne61;
        for (const auto x : hashes) {
            const auto h = mod_mersenne(static_cast<unsigned __int128>(perm.a[i]) * x + perm.b[i]);
            best = std::min(best, h);
        }
        sig.values[i] = best;
    }
    return sig;
}

double estimate_similarity(const Signature& a, const Signature& b) {
    if (a.values.size() != b.values.size() || a.values.empty()) return 0.0;
    std::size_t equal = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) equal += a.values[i] == b.values[i];
    return static_cast<double>(equal) / static_cast<double>(a.values.size());
}

DedupResult near_dedup_items(std::vector<DedupItem> items, const NearDedupParams& params) {
    if (!(params.threshold > 0.0 && params.threshold <= 1.0)) {
        throw ValidationError("dedup_threshold", "must lie in (0, 1]");
    }
    if (params.bands == 0 || params.rows == 0 || params.bands * params.rows != params.minhash.num_perm) {
        throw ValidationError("dedup_bands", "bands * rows must equal the number of permutations");
    }
    std::sort(items.begin(), items.end(), [](const DedupItem& x, const DedupItem& y) { return x.id < y.id; });
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i].id == items[i - 1].id) throw SchemaError("duplicate record id '" + items[i].id + "'");
    }

    DisjointSet sets(items.size());

    std::unordered_map<std::string_view, std::size_t> by_digest;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto [it, inserted] = by_digest.emplace(items[i].digest, i);
        if (!inserted) sets.unite(it->second, i);
    }

    for (std::size_t band = 0; band < params.bands; ++band) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto& v = items[i].signature.values;
            std::uint64_t h = 0xCBF29CE484222325ULL ^ band;
            for (std::size_t r = 0; r < params.rows; ++r) {
                h ^= v[band * params.rows + r];
                h *= 0x100000001B3ULL;
                h ^= h >> 29;
            }
            buckets[h].push_back(i);
        }
        for (const auto& [hash, members] : buckets) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    const auto i = members[x], j = members[y];
                    if (sets.find(i) == sets.find(j)) continue;
                    if (estimate_similarity(items[i].signature, items[j].signature) >= params.threshold) {
                        sets.unite(i, j);
                    }
                }
            }
        }
    }

    DedupResult result;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto root = sets.find(i);
        if (root == i) {
            result.kept.push_back(items[i].id);
        } else {
            result.removed.emplace_back(items[root].id, items[i].id);
        }
    }
    std::sort(result.removed.begin(), result.removed.end());
    return result;
}

DedupResult near_dedup(const std::vector<CorpusRecord>& records, const NearDedupParams& params) {
    std::vector<DedupItem> items;
    items.reserve(records.size());
    for (const auto& r : records) {
        items.push_back({r.id, content_digest(r.content), minhash_signature(r.content, params.minhash)});
    }
    return near_dedup_items(std::move(items), params);
}

std::string format_cluster_report(const DedupResult& result) {
    std::string out;
    for (const auto& [kept, removed] : result.removed) out += kept + '\t' + removed + '\n';
    return out;
}

}  // namespace corpuskit
