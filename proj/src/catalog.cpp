#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <openssl/sha.h>

#include "trichord/chords.hpp"

namespace trichord {

namespace {

bool lex_less(const PhaseState& a, const PhaseState& b) {
  const Vec6 x = a.flat(), y = b.flat();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// The same geometric chord traversed from its far end.
Chord swap_ends(const Chord& c, const SystemParams& params, const RefineOptions& ropts) {
  const PhaseState far = apply_involution(involution_of(c.target), c.terminal);
  const auto [chart, branch] = chart_of(c.target, far);
  Seed seed;
  seed.chart = chart;
  seed.branch = branch;
  seed.h = c.h;
  seed.grid_index = c.grid_index;
  const auto s0 = seed_state(c.target, chart, c.h, branch, params);
  if (!s0) throw RefinementFailed(RefineFailure::forbidden_region, "dedup: far end outside the Hill region", {});
  seed.state = *s0;
  return refine(seed, c.duration, c.target, params, ropts);
}

}  // namespace

std::vector<Chord> dedup(std::span<const Chord> chords, const SystemParams& params, const DedupOptions& dopts,
                         const RefineOptions& ropts) {
  const std::size_t n = chords.size();
  std::vector<PhaseState> far(n);
  for (std::size_t i = 0; i < n; ++i)
    far[i] = apply_involution(involution_of(chords[i].target), chords[i].terminal);

  std::vector<std::size_t> by_time(n);
  std::iota(by_time.begin(), by_time.end(), 0);
  std::stable_sort(by_time.begin(), by_time.end(),
                   [&](std::size_t a, std::size_t b) { return chords[a].duration < chords[b].duration; });

  UnionFind uf(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Chord& ca = chords[by_time[a]];
    for (std::size_t b = a + 1; b < n; ++b) {
      const Chord& cb = chords[by_time[b]];
      if (cb.duration - ca.duration > dopts.time_tol) break;
      const bool same = max_abs_diff(ca.initial, cb.initial) <= dopts.pos_tol ||
                        max_abs_diff(ca.initial, far[by_time[b]]) <= dopts.pos_tol;
      if (same) uf.join(by_time[a], by_time[b]);
    }
  }

  // Per class: the lexicographically smallest orientation over all members.
  struct Best {
    std::size_t member;
    bool swapped;
  };
  std::vector<std::optional<Best>> best(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = best[uf.find(i)];
    auto state_of = [&](const Best& x) -> const PhaseState& { return x.swapped ? far[x.member] : chords[x.member].initial; };
    for (bool sw : {false, true}) {
      const Best cand{i, sw};
      if (!b || lex_less(state_of(cand), state_of(*b))) b = cand;
    }
  }

  std::vector<Chord> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!best[i]) continue;
    const Chord& c = chords[best[i]->member];
    if (!best[i]->swapped) {
      out.push_back(c);
      continue;
    }
    try {
      out.push_back(swap_ends(c, params, ropts));
    } catch (const Error&) {
      out.push_back(c);  // keep the orientation we have
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Chord& a, const Chord& b) {
    if (a.duration != b.duration) return a.duration < b.duration;
    return a.initial.q[0] < b.initial.q[0];
  });
  return out;
}

std::string chord_id(const Chord& c) {
  const Vec6 s = c.initial.flat();
  const std::string text =
      fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", s[0], s[1], s[2], s[3], s[4], s[5], c.duration);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  for (int i = 0; i < 6; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace trichord
