#pragma once

#include <vector>

#include "balancelab/load_vector.hpp"
#include "balancelab/process.hpp"
#include "balancelab/rng.hpp"

namespace balancelab {

// Which token-selection rule a balancing transfer uses. The rule never
// changes the resulting loads; it only decides which distinguishable tokens
// travel, which is what the height analysis observes.
struct BalanceMode {
  enum class Kind { kStack, kSkip, kShuffleStack };

  Kind kind = Kind::kStack;
  long long c = 10;  // band constant, meaningful for kShuffleStack only

  static BalanceMode stack() { return {Kind::kStack, 10}; }
  static BalanceMode skip() { return {Kind::kSkip, 10}; }
  static BalanceMode shuffle_stack(long long c);
};

inline const char* mode_kind_name(BalanceMode::Kind kind) {
  switch (kind) {
    case BalanceMode::Kind::kStack: return "stack";
    case BalanceMode::Kind::kSkip: return "skip";
    case BalanceMode::Kind::kShuffleStack: return "shuffle";
  }
  return "?";
}

// Per-node ordered stacks of distinguishable token ids. Position within a
// stack is the token's height (bottom = 0). Keeps an id -> (node, height)
// back-map so height lookups are O(1).
class TokenLayout {
 public:
  // Tokens are numbered 0..m-1, assigned bottom-up, node by node.
  static TokenLayout from_loads(const LoadVector& lv);

  int node_count() const { return static_cast<int>(stacks_.size()); }
  long long token_count() const { return static_cast<long long>(pos_.size()); }
  long long load(int node) const { return static_cast<long long>(stacks_[node].size()); }
  LoadVector loads() const;

  int node_of(int token) const;
  long long height_of(int token) const;
  const std::vector<int>& stack(int node) const { return stacks_[node]; }

  // Moves the k topmost tokens of `from` onto `to`, preserving their order.
  void transfer_stack(int from, int to, long long k);

  // Moves k tokens selected from the top of `from` taking every other one
  // (heights top, top-2, ...); the receiver gets them in increasing original
  // height order, the sender's remaining tokens close ranks.
  void transfer_skip(int from, int to, long long k);

  // Uniformly permutes the tokens of `node` whose normalized height (height
  // minus rounded_avg) lies in [2, 2c]. Tokens outside the band keep their
  // positions.
  void shuffle_band(int node, long long c, long long rounded_avg, Pcg32& rng);

  // Stack transfer preceded by a band shuffle on both endpoints (`from`
  // first, then `to`).
  void transfer_shuffle_stack(int from, int to, long long k, long long c,
                              long long rounded_avg, Pcg32& rng);

  // Performs the token movement matching one balancing step of the pair
  // (pair.u receives the ceiling share). Dispatches on mode and returns the
  // number of tokens moved. `rng` is consumed only in shuffle-stack mode.
  long long apply_balanced_transfer(PairChoice pair, const BalanceMode& mode,
                                    long long rounded_avg, Pcg32* rng = nullptr);

  // Internal coherence: stacks and back-map agree, every id appears once.
  bool validate() const;

  // Stack sizes equal the given load vector entry-for-entry.
  bool matches(const LoadVector& lv) const;

 private:
  void reindex_node(int node);

  std::vector<std::vector<int>> stacks_;
  struct Pos {
    int node;
    long long height;
  };
  std::vector<Pos> pos_;
};

// Height of a token relative to the rounded average load.
long long normalized_height(const TokenLayout& layout, int token, long long rounded_avg);

}  // namespace balancelab
