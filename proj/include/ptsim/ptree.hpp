#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <vector>

#include "ptsim/bits.hpp"

namespace ptsim {

/// Depth-bounded stand-in for a Pi-0-1 class of ordered k-partitions:
/// an explicitly enumerated, prefix-closed set of partition codes.
/// Node lengths are multiples of `parts`; the code of length parts*L
/// describes the partition of positions 0..L-1. Trees are kept pruned,
/// i.e. every node has a descendant at full depth, so emptiness at full
/// depth is authoritative.
struct PartitionTree {
  std::size_t parts = 1;
  std::size_t depth = 0;
  std::set<Bits> nodes;

  bool empty() const { return nodes.empty(); }
};

/// A set of full-depth codes, all of length parts*depth.
struct PathSet {
  std::size_t parts = 1;
  std::size_t depth = 0;
  std::set<Bits> codes;
};

enum class RefineMode { Prefix, Subset };

/// True iff every coded position is covered by some part. Parts may
/// overlap. Requires |code| to be a multiple of k.
bool is_partition_code(const Bits& code, std::size_t k);

/// The tree of all ordered k-partition codes up to `depth`.
PartitionTree full_partition_tree(std::size_t k, std::size_t depth);

/// The tree whose single full-depth path is the given code (plus its
/// prefixes). The code must be a valid partition code.
PartitionTree single_path_tree(std::size_t k, const Bits& path);

bool nonempty_at_depth(const PartitionTree& t, std::size_t d);

std::vector<Bits> nodes_at_level(const PartitionTree& t, std::size_t level);

PathSet paths_at_depth(const PartitionTree& t, std::size_t d);

/// Rebuild the node set from a collection of full-depth codes: the codes
/// plus all their prefixes at multiples of `parts`.
PartitionTree tree_from_paths(std::size_t parts, std::size_t depth, const std::set<Bits>& paths);

/// Cross of n >= 2 codes sharing k and length: the code over
/// k*C(n,2) parts whose part (j,p,q), in lexicographic order on
/// (j, p, q) with p < q, is the intersection of part j of codes[p] and
/// part j of codes[q].
Bits cross_codes(const std::vector<Bits>& codes, std::size_t k);

/// Cross of n >= 2 trees with common k and depth. The full-depth paths
/// of the result are the crosses of all full-depth path tuples; the node
/// set is their prefix closure.
PartitionTree cross_trees(const std::vector<PartitionTree>& trees);

/// Subtree of the paths X with tau < X_i/sigma (Prefix mode) or
/// tau <= X_i/sigma set-wise (Subset mode), re-pruned. The stem sigma
/// used for the overwrite is supplied by the caller.
PartitionTree refine_below(const PartitionTree& t, std::size_t part, const Bits& tau,
                           RefineMode mode, const Bits& sigma);

/// Number of output parts of cross_codes/cross_trees: k * C(n,2).
std::size_t cross_parts(std::size_t k, std::size_t n);

/// Sanity check: prefix closure, node validity, lengths. Returns the
/// list of violations (empty = ok).
std::vector<std::string> tree_violations(const PartitionTree& t);

/// Line format: header "k=<k> depth=<d>", then one node per line in
/// canonical text encoding (the root is an empty line).
void serialize_tree(std::ostream& os, const PartitionTree& t);
PartitionTree parse_tree(std::istream& is);

}  // namespace ptsim
