#include "balancelab/token_layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace balancelab {

BalanceMode BalanceMode::shuffle_stack(long long c) {
  if (c < 10) throw std::invalid_argument("BalanceMode: band constant must be >= 10");
  return {Kind::kShuffleStack, c};
}

TokenLayout TokenLayout::from_loads(const LoadVector& lv) {
  TokenLayout layout;
  layout.stacks_.resize(lv.n());
  long long total = 0;
  for (long long l : lv.loads) {
    if (l < 0) throw std::invalid_argument("TokenLayout: negative load");
    total += l;
  }
  layout.pos_.reserve(static_cast<std::size_t>(total));
  int next_id = 0;
  for (int node = 0; node < lv.n(); ++node) {
    auto& stack = layout.stacks_[node];
    stack.reserve(static_cast<std::size_t>(lv.loads[node]));
    for (long long h = 0; h < lv.loads[node]; ++h) {
      stack.push_back(next_id);
      layout.pos_.push_back(Pos{node, h});
      ++next_id;
    }
  }
  return layout;
}

LoadVector TokenLayout::loads() const {
  LoadVector lv;
  lv.loads.reserve(stacks_.size());
  for (const auto& s : stacks_) lv.loads.push_back(static_cast<long long>(s.size()));
  return lv;
}

int TokenLayout::node_of(int token) const {
  if (token < 0 || token >= static_cast<int>(pos_.size())) {
    throw std::out_of_range("TokenLayout: unknown token id");
  }
  return pos_[token].node;
}

long long TokenLayout::height_of(int token) const {
  if (token < 0 || token >= static_cast<int>(pos_.size())) {
    throw std::out_of_range("TokenLayout: unknown token id");
  }
  return pos_[token].height;
}

void TokenLayout::reindex_node(int node) {
  const auto& stack = stacks_[node];
  for (std::size_t h = 0; h < stack.size(); ++h) {
    pos_[stack[h]] = Pos{node, static_cast<long long>(h)};
  }
}

void TokenLayout::transfer_stack(int from, int to, long long k) {
  if (k < 0 || k > load(from)) throw std::invalid_argument("transfer_stack: invalid count");
  if (k == 0) return;
  auto& src = stacks_[from];
  auto& dst = stacks_[to];
  std::size_t cut = src.size() - static_cast<std::size_t>(k);
  dst.insert(dst.end(), src.begin() + cut, src.end());
  src.resize(cut);
  reindex_node(to);
}

void TokenLayout::transfer_skip(int from, int to, long long k) {
  long long l = load(from);
  long long available = (l + 1) / 2;  // heights top, top-2, ..., down to 0 or 1
  if (k < 0 || k > available) throw std::invalid_argument("transfer_skip: invalid count");
  if (k == 0) return;

  auto& src = stacks_[from];
  auto& dst = stacks_[to];
  // Selected heights are l-1, l-3, ..., l-(2k-1); collect bottom-up so the
  // receiver sees increasing original heights.
  std::vector<int> moved;
  moved.reserve(static_cast<std::size_t>(k));
  std::vector<char> selected(src.size(), 0);
  for (long long s = k; s >= 1; --s) {
    long long h = l - (2 * s - 1);
    selected[static_cast<std::size_t>(h)] = 1;
    moved.push_back(src[static_cast<std::size_t>(h)]);
  }
  std::size_t w = 0;
  for (std::size_t h = 0; h < src.size(); ++h) {
    if (!selected[h]) src[w++] = src[h];
  }
  src.resize(w);
  dst.insert(dst.end(), moved.begin(), moved.end());
  reindex_node(from);
  reindex_node(to);
}

void TokenLayout::shuffle_band(int node, long long c, long long rounded_avg, Pcg32& rng) {
  auto& stack = stacks_[node];
  long long lo = rounded_avg + 2;
  long long hi = rounded_avg + 2 * c;
  if (lo < 0) lo = 0;
  long long top = static_cast<long long>(stack.size()) - 1;
  if (hi > top) hi = top;
  if (hi <= lo) return;  // band of size 0 or 1, nothing to permute
  std::span<int> band(stack.data() + lo, static_cast<std::size_t>(hi - lo + 1));
  shuffle_span(band, rng);
  reindex_node(node);
}

void TokenLayout::transfer_shuffle_stack(int from, int to, long long k, long long c,
                                         long long rounded_avg, Pcg32& rng) {
  shuffle_band(from, c, rounded_avg, rng);
  shuffle_band(to, c, rounded_avg, rng);
  transfer_stack(from, to, k);
}

long long TokenLayout::apply_balanced_transfer(PairChoice pair, const BalanceMode& mode,
                                               long long rounded_avg, Pcg32* rng) {
  if (pair.u == pair.v || pair.u < 0 || pair.v < 0 || pair.u >= node_count() ||
      pair.v >= node_count()) {
    throw std::invalid_argument("apply_balanced_transfer: invalid node pair");
  }
  long long lu = load(pair.u);
  long long lv = load(pair.v);
  auto [ceil_half, floor_half] = balance_pair(lu, lv);
  int from;
  int to;
  long long k;
  if (ceil_half > lu) {
    from = pair.v;
    to = pair.u;
    k = ceil_half - lu;
  } else if (floor_half > lv) {
    from = pair.u;
    to = pair.v;
    k = floor_half - lv;
  } else {
    from = pair.u;
    to = pair.v;
    k = 0;
  }

  switch (mode.kind) {
    case BalanceMode::Kind::kStack:
      transfer_stack(from, to, k);
      break;
    case BalanceMode::Kind::kSkip:
      transfer_skip(from, to, k);
      break;
    case BalanceMode::Kind::kShuffleStack: {
      if (rng == nullptr) {
        throw std::invalid_argument("apply_balanced_transfer: shuffle-stack mode needs an rng");
      }
      // Both endpoints shuffle before the transfer, in pair order.
      shuffle_band(pair.u, mode.c, rounded_avg, *rng);
      shuffle_band(pair.v, mode.c, rounded_avg, *rng);
      transfer_stack(from, to, k);
      break;
    }
  }
  return k;
}

bool TokenLayout::validate() const {
  std::vector<char> seen(pos_.size(), 0);
  for (int node = 0; node < node_count(); ++node) {
    const auto& stack = stacks_[node];
    for (std::size_t h = 0; h < stack.size(); ++h) {
      int id = stack[h];
      if (id < 0 || id >= static_cast<int>(pos_.size())) return false;
      if (seen[id]) return false;
      seen[id] = 1;
      if (pos_[id].node != node || pos_[id].height != static_cast<long long>(h)) return false;
    }
  }
  for (char s : seen) {
    if (!s) return false;
  }
  return true;
}

bool TokenLayout::matches(const LoadVector& lv) const {
  if (lv.n() != node_count()) return false;
  for (int i = 0; i < lv.n(); ++i) {
    if (lv.loads[i] != load(i)) return false;
  }
  return true;
}

long long normalized_height(const TokenLayout& layout, int token, long long rounded_avg) {
  return layout.height_of(token) - rounded_avg;
}

}  // namespace balancelab
